"""Command-line driver for the lexicon pipeline and the semantic-space analyses.

Usage::

    dislex train --lexicon lex.tsv --embeddings vec.txt --out run1
    dislex classify --config exp.yaml --feature case --source pca:50
    dislex tsne --config exp.yaml --feature tense && dislex plot --config exp.yaml

Every subcommand reads the same configuration (a YAML/JSON file, overridden
by flags), writes its outputs atomically under ``--out`` and exits with
status 2 on any pipeline error.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__, _diagnostics
from ._io import atomic_open, atomic_write_json
from .config import derive_seeds, parse_source, resolve
from .cues import build_cue_matrix, encode_word, encode_words, read_gram_index, write_cue_matrix
from .datasets import bundled_paths
from .exceptions import ClassTooSmall, DislexError, EmptyInput, UnknownFeature
from .lexdata import (
    CATEGORICAL,
    feature_counts,
    join_dataset,
    parse_embedding_file,
    parse_lexicon_file,
    resolve_syncretic,
    split_heldout,
    validate_lexicon,
    write_lexicon_file,
)
from .mapping import (
    MappingPair,
    evaluate_comprehension,
    load_matrix,
    mapping_metadata,
    predict_semantics,
    write_matrix,
    train_endstate,
)
from .plotting import emit_scatter
from .production import evaluate_production, tabulate_errors, write_production_tsv
from .semspace import fit_pca, loocv_lda, pca_sweep_lda, shift_vectors, tsne

log = logging.getLogger("dislex.cli")

SHIFT_FEATURES = {"case": "case", "gender": "gender", "gender3": "gender", "gender5": "gender",
                  "pos": "pos", "pos_detailed": "pos"}


# -- inputs --------------------------------------------------------------------


def _open_input(path, what):
    if not path:
        raise EmptyInput(f"no {what} path given (set it in the config or with --{what})")
    try:
        return open(path, encoding="utf-8")
    except FileNotFoundError:
        raise EmptyInput(f"{path}: {what} file does not exist") from None
    except IsADirectoryError:
        raise EmptyInput(f"{path}: {what} path is a directory") from None


def load_inputs(cfg):
    """Lexicon + embeddings -> resolved lexicon, dataset and ingest statistics."""
    with _open_input(cfg.lexicon, "lexicon") as fh:
        raw = _annotate(cfg.lexicon, parse_lexicon_file, fh, cfg.lexicon)
    with _open_input(cfg.embeddings, "embeddings") as fh:
        table = _annotate(cfg.embeddings, parse_embedding_file, fh)
    lexicon = resolve_syncretic(raw.entries, provenance=raw.provenance)
    violations = validate_lexicon(lexicon)
    dataset = join_dataset(lexicon, table)
    stats = {
        "lexicon_rows": len(raw),
        "syncretic_dropped": lexicon.dropped,
        "unique_words": len(lexicon),
        "embedding_rows": len(table),
        "embedding_duplicates": table.duplicates,
        "dim": table.dim,
        "missing_vectors": dataset.missing,
        "words": len(dataset),
        "applicability_violations": len(violations),
    }
    return lexicon, dataset, stats


def _annotate(path, fn, fh, *args):
    try:
        return fn(fh, *args)
    except DislexError as exc:
        exc.args = (f"{path}: {exc}",) + exc.args[1:]
        raise


def _out(cfg, *parts):
    return os.path.join(cfg.out, *parts)


# -- subcommands ---------------------------------------------------------------


def cmd_ingest(cfg, args):
    lexicon, dataset, stats = load_inputs(cfg)
    stats["features"] = {f: dict(sorted(feature_counts(dataset, f).items())) for f in CATEGORICAL}
    with atomic_open(_out(cfg, "lexicon.resolved.tsv")) as fh:
        write_lexicon_file(lexicon, fh)
    atomic_write_json(_out(cfg, "ingest.json"), stats)
    return stats


def _comprehension(sub, cm_index, pair, gold, gold_ids, metric, n, names):
    pred = predict_semantics(encode_words(sub.words, cm_index, n), pair.F)
    return evaluate_comprehension(pred, gold, gold_ids, metric, names)


def cmd_train(cfg, args):
    """Fit F and G on full and training data; score comprehension/production on full/train/test."""
    lexicon, dataset, stats = load_inputs(cfg)
    seeds = derive_seeds(cfg.seed)
    train, test = split_heldout(dataset, cfg.n_test(len(dataset)), seeds["split"])

    cm_full = build_cue_matrix(dataset.words, cfg.n)
    cm_train = build_cue_matrix(train.words, cfg.n)
    pair_full = train_endstate(cm_full, dataset.S, cfg.ridge)
    pair_train = train_endstate(cm_train, train.S, cfg.ridge)

    index = dataset.index_of()
    runs = {
        "full": (dataset, cm_full, pair_full, None, None),
        "train": (train, cm_train, pair_train, None, None),
        "test": (test, cm_train, pair_train,
                 pair_train.F if cfg.strict_heldout else pair_full.F,
                 cm_train.index if cfg.strict_heldout else cm_full.index),
    }
    summary = {"comprehension": {}, "production": {}}
    for name, (sub, cm, pair, fb_F, fb_index) in runs.items():
        # every condition is scored against the full set of gold vectors
        comp = _comprehension(sub, cm.index, pair, dataset.S, [index[w] for w in sub.words],
                              cfg.metric, cfg.n, dataset.words)
        acc, records = evaluate_production(sub, pair, cm.index, cfg.theta, cfg.beam, cfg.max_len,
                                           cfg.metric, lexicon, fb_F, fb_index, cfg.n)
        summary["comprehension"][name] = comp.accuracy
        summary["production"][name] = acc
        with atomic_open(_out(cfg, f"comprehension_{name}.tsv")) as fh:
            comp.to_tsv(fh)
        with atomic_open(_out(cfg, f"production_{name}.tsv")) as fh:
            write_production_tsv(records, fh)
        if name == "test":
            errors = tabulate_errors(records)
            categories = {}
            for r in records:
                categories[r.category] = categories.get(r.category, 0) + 1
            summary["production_errors_test"] = {
                "categories": dict(sorted(categories.items())),
                "feature_changes": dict(sorted(errors.items())),
            }

    for tag, pair, cm in (("full", pair_full, cm_full), ("train", pair_train, cm_train)):
        _save_model(cfg, tag, pair, cm)
    with atomic_open(_out(cfg, "split.tsv")) as fh:
        fh.write("word\tset\n")
        test_words = set(test.words)
        for w in dataset.words:
            fh.write(f"{w}\t{'test' if w in test_words else 'train'}\n")

    summary.update({
        "n_words": len(dataset), "n_train": len(train), "n_test": len(test),
        "n_grams": len(cm_full.index), "dim": int(dataset.S.shape[1]),
        "residual_full": float(np.abs(cm_full.cells @ pair_full.F - dataset.S).max()),
        "seed": cfg.seed, "seeds": seeds, "strict_heldout": cfg.strict_heldout,
        "ingest": stats, "config": {k: v for k, v in cfg.to_dict().items() if k != "out"},
    })
    atomic_write_json(_out(cfg, "summary.json"), summary)
    return summary


def _save_model(cfg, tag, pair, cm):
    for name, M in (("F", pair.F), ("G", pair.G)):
        path = _out(cfg, f"{name}_{tag}.bin")
        with atomic_open(path, "wb") as fh:
            write_matrix(fh, M)
        meta = mapping_metadata(pair, cfg.metric, cm.index)
        meta.update({"matrix": name, "shape": list(M.shape), "n": cm.n})
        atomic_write_json(path + ".json", meta)
    with atomic_open(_out(cfg, f"cues_{tag}.tsv")) as cells, atomic_open(_out(cfg, f"grams_{tag}.tsv")) as grams:
        write_cue_matrix(cm, cells, grams)


def cmd_eval(cfg, args):
    """Score a saved model on the configured lexicon (e.g. new words)."""
    lexicon, dataset, _ = load_inputs(cfg)
    model_dir = args.model or cfg.out
    tag = args.tag
    try:
        F = load_matrix(os.path.join(model_dir, f"F_{tag}.bin"))
        G = load_matrix(os.path.join(model_dir, f"G_{tag}.bin"))
        with open(os.path.join(model_dir, f"grams_{tag}.tsv"), encoding="utf-8") as fh:
            gram_index, n = read_gram_index(fh)
    except FileNotFoundError as exc:
        raise EmptyInput(f"{exc.filename}: model file missing; run 'dislex train' first") from None
    pair = MappingPair(F, G)
    unseen = sum(bool(encode_word(w, gram_index, n)[1]) for w in dataset.words)
    comp = _comprehension(dataset, gram_index, pair, dataset.S, np.arange(len(dataset)),
                          cfg.metric, n, dataset.words)
    acc, records = evaluate_production(dataset, pair, gram_index, cfg.theta, cfg.beam, cfg.max_len,
                                       cfg.metric, lexicon, n=n)
    with atomic_open(_out(cfg, "eval_comprehension.tsv")) as fh:
        comp.to_tsv(fh)
    with atomic_open(_out(cfg, "eval_production.tsv")) as fh:
        write_production_tsv(records, fh)
    result = {"comprehension": comp.accuracy, "production": acc, "words": len(dataset),
              "words_with_unseen_grams": unseen, "model": tag}
    atomic_write_json(_out(cfg, "eval.json"), result)
    return result


def _feature_labels(dataset, feature):
    if feature is None:
        raise UnknownFeature("no feature given (use --feature)")
    if feature not in CATEGORICAL:
        raise UnknownFeature(f"unknown feature {feature!r}; expected one of {', '.join(CATEGORICAL)}")
    return dataset.labels(feature)


def _classify_inputs(cfg, dataset):
    """Matrix and labels for the configured source, before dropping unlabeled rows."""
    kind, d = parse_source(cfg.source)
    if kind == "shifts":
        if cfg.feature not in SHIFT_FEATURES:
            raise UnknownFeature(f"feature {cfg.feature!r} is not defined on shift vectors; "
                                 f"use one of {', '.join(sorted(SHIFT_FEATURES))}")
        sv = shift_vectors(dataset)
        return sv.rows, sv.labels(SHIFT_FEATURES[cfg.feature])
    labels = _feature_labels(dataset, cfg.feature)
    X = dataset.S
    if kind == "pca":
        if d > X.shape[1]:
            raise ClassTooSmall(f"pca:{d} exceeds the embedding dimension {X.shape[1]}")
        X = fit_pca(X).transform(X, d)
    return X, labels


def _drop_unlabeled(X, labels):
    keep = [i for i, v in enumerate(labels) if v is not None]
    return X[keep], [labels[i] for i in keep], len(labels) - len(keep)


def cmd_classify(cfg, args):
    _, dataset, _ = load_inputs(cfg)
    X, labels = _classify_inputs(cfg, dataset)
    X, labels, dropped = _drop_unlabeled(X, labels)
    if len(set(labels)) < 2:
        raise ClassTooSmall(f"feature {cfg.feature!r} has {len(set(labels))} class(es) after dropping "
                            f"{dropped} unlabeled row(s)")
    report = loocv_lda(X, labels, cfg.shrinkage)
    stem = f"classify_{cfg.feature}_{cfg.source.replace(':', '')}"
    with atomic_open(_out(cfg, stem + ".tsv")) as fh:
        report.to_tsv(fh)
    summary = report.summary()
    summary.update({"feature": cfg.feature, "source": cfg.source, "dropped": dropped,
                    "n_total": len(labels) + dropped, "lambda": cfg.shrinkage})
    atomic_write_json(_out(cfg, stem + ".json"), summary)
    return summary


def cmd_sweep(cfg, args):
    _, dataset, _ = load_inputs(cfg)
    X, labels, dropped = _drop_unlabeled(dataset.S, _feature_labels(dataset, cfg.feature))
    p = X.shape[1]
    dims = sorted({min(d, p) for d in cfg.sweep_dims})
    if any(d > p for d in cfg.sweep_dims):
        _diagnostics.emit("sweep_dims_clipped", requested=sorted(cfg.sweep_dims), dim=p)
    rows = pca_sweep_lda(X, labels, dims, cfg.shrinkage)
    with atomic_open(_out(cfg, f"sweep_{cfg.feature}.tsv")) as fh:
        fh.write("n_components\taccuracy\n")
        for d, acc in rows:
            fh.write(f"{d}\t{acc!r}\n")
    result = {"feature": cfg.feature, "dims": [d for d, _ in rows], "accuracy": [a for _, a in rows],
              "N": len(labels), "dropped": dropped, "lambda": cfg.shrinkage}
    atomic_write_json(_out(cfg, f"sweep_{cfg.feature}.json"), result)
    return result


def cmd_shifts(cfg, args):
    _, dataset, _ = load_inputs(cfg)
    sv = shift_vectors(dataset)
    with atomic_open(_out(cfg, "shifts.tsv")) as fh:
        fh.write("plural\tsingular\tlemma\tcase\tgender\tpos\t" +
                 "\t".join(f"v{j}" for j in range(sv.rows.shape[1])) + "\n")
        for i in range(len(sv)):
            values = "\t".join(repr(float(v)) for v in sv.rows[i])
            fh.write(f"{sv.plural[i]}\t{sv.singular[i]}\t{sv.lemma[i]}\t{sv.case[i]}\t"
                     f"{sv.gender[i]}\t{sv.pos[i]}\t{values}\n")
    result = {"pairs": len(sv), "skipped_groups": sv.skipped,
              "case_counts": dict(sorted(_count(sv.case).items()))}
    atomic_write_json(_out(cfg, "shifts.json"), result)
    return result


def _count(values):
    out = {}
    for v in values:
        out[str(v)] = out.get(str(v), 0) + 1
    return out


def cmd_tsne(cfg, args):
    _, dataset, _ = load_inputs(cfg)
    labels = dataset.labels(cfg.feature) if cfg.feature else [""] * len(dataset)
    if cfg.feature and cfg.feature not in CATEGORICAL:
        raise UnknownFeature(f"unknown feature {cfg.feature!r}")
    seeds = derive_seeds(cfg.seed)
    Y, history = tsne(dataset.S, cfg.perplexity, cfg.tsne_iterations, seeds["tsne"], return_history=True)
    with atomic_open(_out(cfg, "tsne.tsv")) as fh:
        fh.write("word\tx\ty\tlabel\n")
        for w, (x, y), lab in zip(dataset.words, Y, labels):
            fh.write(f"{w}\t{float(x)!r}\t{float(y)!r}\t{'' if lab is None else lab}\n")
    result = {"kl_divergence": float(history[-1]), "perplexity": cfg.perplexity,
              "iterations": cfg.tsne_iterations, "seed": seeds["tsne"], "feature": cfg.feature}
    atomic_write_json(_out(cfg, "tsne.json"), result)
    return result


def cmd_plot(cfg, args):
    path = args.input or _out(cfg, "tsne.tsv")
    with _open_input(path, "input") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:3] != ["word", "x", "y"]:
            raise EmptyInput(f"{path}: expected a 'word x y [label]' table")
        coords, labels = [], []
        for line in fh:
            cells = line.rstrip("\n").split("\t")
            if len(cells) < 3:
                continue
            coords.append((float(cells[1]), float(cells[2])))
            labels.append(cells[3] if len(cells) > 3 else "")
    out = args.output or _out(cfg, "tsne.svg")
    emit_scatter(np.array(coords).reshape(-1, 2), labels, out, title=cfg.feature)
    return {"points": len(coords), "classes": len(set(labels)), "svg": out}


COMMANDS = {
    "ingest": (cmd_ingest, "parse, deduplicate, validate and join the inputs"),
    "train": (cmd_train, "fit comprehension/production mappings and score full/train/test"),
    "eval": (cmd_eval, "score a saved model on the configured lexicon"),
    "classify": (cmd_classify, "LOOCV LDA of one feature from embeddings, shifts or PCA scores"),
    "sweep": (cmd_sweep, "LOOCV LDA accuracy over growing numbers of principal components"),
    "shifts": (cmd_shifts, "singular-to-plural shift vectors"),
    "tsne": (cmd_tsne, "two-dimensional t-SNE map of the embeddings"),
    "plot": (cmd_plot, "render a t-SNE table as an SVG scatterplot"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("experiment")
    g.add_argument("--config", help="YAML or JSON experiment file; flags override its values")
    g.add_argument("--seed", type=int, help="master seed (default 0)")
    g.add_argument("--out", help="output directory (default dislex-out)")
    g.add_argument("--metric", choices=("pearson", "cosine"), help="similarity metric (default pearson)")
    g.add_argument("--ridge", type=float, help="ridge penalty for the mappings (default 0)")
    g.add_argument("--theta", type=float, help="gram support threshold for production (default 0.01)")
    g.add_argument("--beam", type=int, help="candidate forms kept per word (default 20)")
    g.add_argument("--lambda", dest="shrinkage", type=float, help="LDA covariance shrinkage (default 0.01)")
    g.add_argument("--lexicon", help="lexicon TSV")
    g.add_argument("--embeddings", help="text-format word vectors")
    g.add_argument("--demo", action="store_true", help="use the bundled 60-word synthetic corpus")
    g.add_argument("-v", "--verbose", action="store_true", help="also log derived seeds and progress")

    parser = argparse.ArgumentParser(prog="dislex", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    parsers = {}
    for name, (_, help_text) in COMMANDS.items():
        parsers[name] = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    parsers["train"].add_argument("--heldout-size", dest="heldout_size", type=int,
                                  help="held-out words (default 5%% of the data)")
    parsers["train"].add_argument("--strict-heldout", dest="strict_heldout", action="store_const", const=True,
                                  help="production feedback uses F trained without the held-out words")
    parsers["eval"].add_argument("--model", help="directory with F_/G_/grams_ files (default --out)")
    parsers["eval"].add_argument("--tag", choices=("full", "train"), default="full", help="which saved model")
    for name in ("classify", "sweep", "tsne"):
        parsers[name].add_argument("--feature", help="label column, e.g. case, tense, prefix")
    parsers["classify"].add_argument("--source", help="embeddings, shifts or pca:<d> (default embeddings)")
    parsers["sweep"].add_argument("--dims", dest="sweep_dims", type=lambda s: [int(x) for x in s.split(",")],
                                  help="comma-separated component counts")
    parsers["tsne"].add_argument("--perplexity", type=float, help="default 30")
    parsers["tsne"].add_argument("--iterations", dest="tsne_iterations", type=int, help="default 1000")
    parsers["plot"].add_argument("--input", help="t-SNE table (default <out>/tsne.tsv)")
    parsers["plot"].add_argument("--output", help="SVG path (default <out>/tsne.svg)")
    return parser


_OVERRIDES = ("seed", "out", "metric", "ridge", "theta", "beam", "shrinkage", "lexicon", "embeddings",
              "heldout_size", "strict_heldout", "feature", "source", "sweep_dims", "perplexity",
              "tsne_iterations")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _diagnostics.configure(level=logging.INFO if args.verbose else logging.WARNING)
    overrides = {k: getattr(args, k, None) for k in _OVERRIDES}
    if args.demo:
        lex, vec = bundled_paths()
        overrides.update(lexicon=str(lex), embeddings=str(vec))
    try:
        cfg = resolve(args.config, overrides)
        func, _ = COMMANDS[args.command]
        result = func(cfg, args)
    except DislexError as exc:
        print(f"dislex {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(_brief(args.command, result), sort_keys=True))
    return 0


def _brief(command, result):
    if command == "train":
        return {k: result[k] for k in ("comprehension", "production", "n_train", "n_test")}
    if command == "classify":
        return {k: result[k] for k in ("feature", "source", "accuracy", "majority_baseline", "p_value", "N")}
    return result


if __name__ == "__main__":
    sys.exit(main())
