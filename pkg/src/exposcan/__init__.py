"""exposcan: find CWE-200 sensitive-information exposures in Java source.

Three stages: an attack-surface detector classifies variables, strings,
comments, and call sites with name+context embeddings; a taint-flow engine
traces source-to-sink paths under per-CWE rule templates; a flow verifier
re-scores each enriched trace to suppress false positives.
"""

__version__ = "0.1.0"
