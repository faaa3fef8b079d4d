"""Python interface to the vqc library.

Reports come back as plain dictionaries decoded from the same JSON the
command-line tool writes.
"""

import json

from ._pyvqc import *  # noqa: F401,F403
from ._pyvqc import _evaluate, _train


def train(train_set, validation_set, config, initial):
    """Trains from `initial`; returns (model, history, stopped_epoch, best_epoch)."""
    model, epochs, stopped, best = _train(train_set, validation_set, config, initial)
    return model, [json.loads(e) for e in epochs], stopped, best


def evaluate(model, data, workers=1):
    """Per-class and macro AUC/F1 plus the confusion matrix, as a dict."""
    return json.loads(_evaluate(model, data, workers))
