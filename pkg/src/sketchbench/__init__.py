"""Random projection toolkit: Johnson-Lindenstrauss maps, sketched low-rank
approximation, hypercube nearest-neighbour search, random Fourier features,
random-feature learners, random ReLU layers and projection ensembles."""

__version__ = "0.1.0"
