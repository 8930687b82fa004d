"""Acoustic-emission monitoring pipeline.

Turns raw AE data streams into wavelet scalogram image datasets and trains
ordinal classifiers of bolt-tightening level on them.  The subpackages map
onto the pipeline stages:

- :mod:`aepipeline.ingest` -- stream container format and synthetic campaigns
- :mod:`aepipeline.segmentation` -- per-vibration-cycle slicing + apodization
- :mod:`aepipeline.denoise` -- db45 wavelet denoising of raw stream blocks
- :mod:`aepipeline.cwt` -- Morse-wavelet scalograms and RGB image export
- :mod:`aepipeline.losses` -- ordinal classification losses with gradients
- :mod:`aepipeline.optsched` -- 1cycle schedule, SGDM and AdamW updates
- :mod:`aepipeline.metrics` -- confusion matrices and the +/-1 metric family
- :mod:`aepipeline.trainer` -- desk-scale linear softmax reference trainer
- :mod:`aepipeline.experiments` -- split construction and sweep harnesses
- :mod:`aepipeline.cli` -- the ``aepipeline`` command
"""

__version__ = "0.1.0"
