try:
    from ._drlcp import *  # noqa: F401,F403
    from ._drlcp import __doc__  # noqa: F401
except ImportError:
    from _drlcp import *  # noqa: F401,F403

__all__ = [
    "InventorySpec",
    "lift",
    "estimate_radius",
    "build_inventory_mps",
    "open_loop",
    "closed_loop",
    "DrlcpError",
]
