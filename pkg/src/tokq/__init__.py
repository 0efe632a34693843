"""tokq: desk-scale transfer-of-knowledge experiments for quantum optimizers.

Three protocols run on exact classical simulators:

* seeded reverse annealing on MaxCut (``tokq.annealing``),
* multitask parameter transfer for QAOA (``tokq.qaoa``),
* sequential parameter transfer along the H2 bond-length sweep (``tokq.vqe``).
"""

__version__ = "0.1.0"
