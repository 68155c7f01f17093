import logging

logger = logging.getLogger("falpv_lft")


def configure_logger(level: int = logging.INFO) -> None:
    """Utility that configures the root logger"""
    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    if any(handler.get_name() == "falpv_lft" for handler in root_logger.handlers):
        return

    handler = logging.StreamHandler()
    handler.set_name("falpv_lft")
    handler.setFormatter(logging.Formatter(fmt="%(levelname)s %(message)s"))
    root_logger.addHandler(handler)
