"""Computons: validate, compose and execute control-driven computation units."""
from .colimit import ColimitResult, Span, coproduct, is_pushable, pushout, unique_from_coproduct
from .computon import (Computon, classify, is_connected, is_primitive, is_trivial, mk_primitive,
                       mk_trivial, primitive, validate)
from .devnet import DeviceRegistry, serve_stub
from .errors import (CompositionError, ComputonsError, ConstructionError, DeviceError, DomainError,
                     ExecutionError, InputError, MorphismError, NonTerminationError,
                     NotPushableError)
from .finset import FinMap, FinSet, disjoint_union, pushout_fns, union
from .iso import computons_isomorphic, find_isomorphism
from .morphism import (Marker, Morphism, canonical_marker, compose, is_monomorphism, mk_in_marker,
                       mk_morphism, mk_out_marker)
from .operators import (Composite, atom, bra_closed, bra_open, control_span, identity_trivial,
                        is_sequentiable, is_sound, marker_pair, mk_glue_for, p_async, seq,
                        span_from_pairs, sync)
from .runtime import run
from .values import ABSENT, SIGNAL, TypeUniverse

__all__ = [name for name in dir() if not name.startswith("_")]
