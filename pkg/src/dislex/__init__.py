"""Discriminative lexicon modelling and semantic-space analysis for inflected word forms."""

__version__ = "0.1.0"
