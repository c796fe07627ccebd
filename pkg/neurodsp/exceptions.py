class NeuroDspError(Exception):
    """Base class for every contract violation raised by the neurodsp apps."""
    pass
