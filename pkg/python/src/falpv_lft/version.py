from importlib.metadata import version

__version__ = version("falpv-lft")
