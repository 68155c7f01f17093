from opentelemetry import trace

from falpv_lft.version import __version__


def get_tracer() -> trace.Tracer:
    return trace.get_tracer("falpv-lft", __version__)
