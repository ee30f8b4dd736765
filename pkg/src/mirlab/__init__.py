"""mirlab: manipulator-independent representation learning lab.

A desk-scale pipeline: a deterministic 2-D manipulation simulator with
multi-domain rendering, paired trajectory datasets, contrastive and
goal-conditioned representation training on a from-scratch autodiff
substrate, and trajectory-tracking evaluation.
"""

__version__ = "0.1.0"
