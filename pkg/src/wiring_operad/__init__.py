"""
Wiring diagrams, their operadic composition, and the algebra of historical
propagators that executes them.

Typical use::

    from wiring_operad import load_bundle, run_session, TupleList
    b = load_bundle("fib.bundle")
    run_session(b.filling(), TupleList.units(10)).columns()
"""
from .algebra import (
    DiagramPropagator,
    EvalSession,
    Filling,
    TraceBundle,
    cascade,
    check_functoriality,
    evaluate_diagram,
    evaluate_step,
    finish_session,
    open_session,
    run_session,
    shuttle,
    step_session,
    trace,
)
from .builtins import BindingError, BuiltinSpec, build_builtin
from .bundle import Bundle, BundleError, dump_bundle, load_bundle, packaged_bundle, parse_bundle
from .canonical import CanonicalForm, canonicalize, same_diagram
from .core import (
    STAR,
    BlackBox,
    Delay,
    DiagramError,
    DomainRegistry,
    Port,
    Slot,
    ValueDomain,
    Violation,
    WireId,
    WiringDiagram,
    make_box,
    make_value_domain,
    validate_diagram,
    wire_tables,
)
from .operad import KEEP, CompositionPlan, compose, compose_diagrams, identity_diagram, permute_interior, tensor_diagrams
from .propagators import (
    Coord,
    Propagator,
    PropagatorError,
    TupleList,
    box_coords,
    check_historical,
    compose_propagators,
    coordinate_project,
    delay_propagator,
    drop_last,
    lift_pointwise,
    moore_propagator,
    prefix_propagator,
    product_propagators,
    zip_align,
)
from .tracefmt import emit_trace, read_trace

__version__ = "0.1.0"
