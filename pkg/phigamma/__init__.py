from .__version__ import __version__ as version

__all__ = ["version"]
