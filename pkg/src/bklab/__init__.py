"""Big-key robustness lab.

Simulates a binary classification task whose features are big-key
encryptions of the class bit, the weighted Hamming metrics over it, small
and large robust classifiers, and an adversary that picks the metric after
probing the classifier.
"""

from . import attack, bigkey, field, learn, metric, task

__version__ = "0.1.0"

__all__ = ["attack", "bigkey", "field", "learn", "metric", "task"]
