"""Alternative execution backend built on a line-projected entity table."""

from .shadow import ShadowAdapter, ShadowEntity, ShadowModel, parse_shadow
from .server import make_service

__all__ = ["ShadowAdapter", "ShadowEntity", "ShadowModel", "parse_shadow", "make_service"]
