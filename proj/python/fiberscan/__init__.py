"""Detection of security fibers in scanned document images."""

import json

import numpy as np

from ._fiberscan import (
    FiberscanError,
    closing,
    detect_ridges,
    dilate,
    erode,
    link_components,
    normalize_background,
    opening,
    to_grayscale,
)
from . import _fiberscan

__all__ = [
    "FiberscanError",
    "closing",
    "detect_ridges",
    "dilate",
    "erode",
    "evaluate",
    "generate_page",
    "link_components",
    "normalize_background",
    "opening",
    "run_pipeline",
    "to_grayscale",
]


def _dump(obj):
    return "" if obj is None else json.dumps(obj)


def run_pipeline(image, config=None, timings=True):
    """Run the detector on a uint8 image of shape (h, w) or (h, w, 3).

    `config` is a dict of detector settings; missing keys take defaults.
    Returns the report as a dict.
    """
    return json.loads(_fiberscan.run_pipeline_json(np.asarray(image), _dump(config), timings))


def generate_page(spec=None, seed=0):
    """Return (image, truth) for a synthetic page."""
    image, truth = _fiberscan.generate_page(_dump(spec), seed)
    return image, json.loads(truth)


def evaluate(images, truths, config=None, match_dist=3.0):
    """Detect on every image and score against the matching truth dicts."""
    return json.loads(
        _fiberscan.evaluate_json(
            [np.asarray(i) for i in images], [json.dumps(t) for t in truths], _dump(config), match_dist
        )
    )
