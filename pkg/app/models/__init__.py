"""Market models and the matching digraph."""
