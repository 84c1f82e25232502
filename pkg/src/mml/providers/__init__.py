"""Provider implementations and the shared provider kit."""

from . import tsdecl, worldbank  # noqa: F401  (import for registry side effects)
from .kit import (  # noqa: F401
    ProvidedContext,
    ProvidedMember,
    ProvidedTypeDef,
    ProviderFailure,
    instantiate_provider,
    lookup_member,
)
