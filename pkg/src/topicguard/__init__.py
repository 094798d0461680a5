"""Off-topic guardrail toolkit.

Generates synthetic (system prompt, user prompt, label) datasets with an
LLM provider, trains bi-encoder and cross-encoder pair classifiers, evaluates
them with calibrated probability scores, and serves threshold decisions over
HTTP.
"""

__version__ = "0.1.0"
