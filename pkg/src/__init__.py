# Device-directed speech classifier for follow-up turns
__version__ = "0.1.0"
