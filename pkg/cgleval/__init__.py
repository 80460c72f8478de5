__version__ = "1.0.0"
__author__ = "Rossen Georgiev"

version_info = (1, 0, 0)
