# EEG graph neural networks
__version__ = "1.0.0"
