"""Pair-scoring HTTP microservice and reranker fine-tuning."""

__version__ = "0.1.0"
