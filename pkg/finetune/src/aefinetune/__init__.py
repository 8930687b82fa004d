"""Fine-tune pretrained ImageNet CNNs on scalogram image datasets.

This package consumes the PNG + JSONL dataset layout and split manifests
produced by the ``aepipeline`` command, trains torchvision backbones with
the same ordinal losses and 1cycle schedule, and writes metric JSON that is
bit-identical to the primary ``eval`` output for the same confusion matrix.
"""

__version__ = "0.1.0"
