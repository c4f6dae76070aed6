"""Artifact-driven EEG BCI toolkit.

Submodules:

- ``signal``   core trial types, loading, and the preprocessing chain
- ``detect``   energy-threshold artifact detection and F1 evaluation
- ``warp``     linear and dynamic time-warping distances
- ``classify`` distance-based kNN classification and evaluation protocols
- ``online``   streaming engine: calibration, blink counting, chunk classification
- ``lexicon``  frequency-ranked dictionary with T9 and prefix lookup
- ``speller``  virtual T9/ABC predictive-keyboard state machine
- ``synth``    synthetic EEG generator for labeled trials and streams
- ``gateway``  CLI entry point and live session service
"""

__version__ = "0.1.0"
