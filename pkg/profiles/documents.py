"""
Metric-spec JSON documents.

The CLI input contract. A document names the dimension, the curvature
order and one of four conformal-factor types:

    {"dimension": 6, "k": 2, "type": "schwarzschild", "mass_param": 1.0}
    {"dimension": 5, "k": 1, "type": "radial_expr", "expr": "-0.5*exp(-r^2)", "tau": 4}
    {"dimension": 5, "k": 1, "type": "flat"}
    {"dimension": 5, "k": 2, "type": "builtin:bump", "params": {"epsilon": 0.05}}

Optional fields: tau, excised_radius, label, params and excised_components
(a list of {shape, center, radius | axes}). Unknown fields are rejected.

Usage:
    from profiles.documents import load_metric_spec

    spec = load_metric_spec("specs/schwarzschild_6_2.json")
"""

import json
import logging
import math
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field as PydanticField, ValidationError, model_validator

from core.exceptions import GBCError, SpecError
from profiles.catalog import flat_spec, schwarzschild_exponent, schwarzschild_profile
from profiles.fields import BUILTIN_FIELDS, RadialExprField, build_builtin
from profiles.metric_spec import ExcisedComponent, MetricSpec

logger = logging.getLogger(__name__)

BASE_TYPES = ('schwarzschild', 'radial_expr', 'flat')


class ExcisedComponentDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    shape: Literal['sphere', 'ellipsoid']
    center: Optional[List[float]] = None
    radius: Optional[float] = PydanticField(default=None, gt=0)
    axes: Optional[List[float]] = None


class MetricSpecDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    dimension: int = PydanticField(ge=4, le=8)
    k: int = PydanticField(ge=1)
    type: str
    mass_param: Optional[float] = None
    expr: Optional[str] = None
    tau: Optional[float] = None
    excised_radius: Optional[float] = PydanticField(default=None, gt=0)
    label: Optional[str] = None
    params: Dict[str, Any] = PydanticField(default_factory=dict)
    excised_components: List[ExcisedComponentDocument] = PydanticField(default_factory=list)

    @model_validator(mode='after')
    def check_consistency(self):
        if not 2 * self.k < self.dimension:
            raise ValueError(f"need 2k < n, got dimension={self.dimension}, k={self.k}")
        if self.type.startswith('builtin:'):
            name = self.type.split(':', 1)[1]
            if name not in BUILTIN_FIELDS:
                raise ValueError(f"unknown built-in field '{name}' (known: {', '.join(BUILTIN_FIELDS)})")
        elif self.type not in BASE_TYPES:
            raise ValueError(f"type must be one of {', '.join(BASE_TYPES)} or builtin:<name>")
        if self.type == 'schwarzschild' and (self.mass_param is None or self.mass_param <= 0):
            raise ValueError("schwarzschild needs a positive mass_param")
        if self.type == 'radial_expr':
            if not self.expr:
                raise ValueError("radial_expr needs expr")
            if self.tau is None:
                raise ValueError("radial_expr needs tau")
        for component in self.excised_components:
            if component.center is not None and len(component.center) != self.dimension:
                raise ValueError("component center has the wrong dimension")
        return self


def _components(doc):
    n = doc.dimension
    components = []
    if doc.excised_radius is not None:
        components.append(ExcisedComponent('sphere', (0.0,) * n, radius=doc.excised_radius))
    for item in doc.excised_components:
        center = tuple(item.center) if item.center is not None else (0.0,) * n
        components.append(ExcisedComponent(
            item.shape,
            center,
            radius=item.radius,
            axes=None if item.axes is None else tuple(item.axes),
        ))
    return tuple(components)


def _default_tau(name, doc, field):
    if doc.tau is not None:
        return doc.tau
    if name in ('shifted_schwarzschild', 'multi_schwarzschild'):
        return schwarzschild_exponent(doc.dimension, doc.k)
    if name == 'bump':
        return math.inf
    if name == 'ellipsoidal':
        return field.decay
    return None


def metric_spec_from_document(doc):
    """Build a MetricSpec from a validated document; an explicit tau always wins."""
    n, k = doc.dimension, doc.k
    components = _components(doc)
    if doc.type == 'schwarzschild':
        spec = schwarzschild_profile(n, k, doc.mass_param, excise=not components, label=doc.label)
        if components:
            spec = replace(spec, excised=components)
        return spec if doc.tau is None else replace(spec, tau=doc.tau)
    if doc.type == 'flat':
        spec = flat_spec(n, k, label=doc.label)
        if components:
            spec = replace(spec, excised=components)
        return spec if doc.tau is None else replace(spec, tau=doc.tau)
    if doc.type == 'radial_expr':
        field = RadialExprField(n, doc.expr, params=doc.params)
        return MetricSpec(
            n=n, k=k, field=field, tau=doc.tau, label=doc.label or f"radial-n{n}-k{k}",
            kind='radial_expr', excised=components,
        )
    name = doc.type.split(':', 1)[1]
    field = build_builtin(name, n, k, doc.params)
    expected = None
    if name in ('shifted_schwarzschild', 'multi_schwarzschild'):
        expected = field.total_mass ** k
    return MetricSpec(
        n=n, k=k, field=field, tau=_default_tau(name, doc, field),
        label=doc.label or f"{name}-n{n}-k{k}", kind=doc.type, excised=components,
        expected_mass=expected,
    )


def parse_metric_spec(payload):
    """
    Validate a decoded JSON object and build the spec.

    Raises:
        SpecError: Any validation or construction failure
    """
    try:
        doc = MetricSpecDocument.model_validate(payload)
    except ValidationError as exc:
        raise SpecError(f"invalid metric spec: {exc}") from exc
    try:
        return metric_spec_from_document(doc)
    except SpecError:
        raise
    except GBCError as exc:
        raise SpecError(f"invalid metric spec: {exc}") from exc


def load_metric_spec(path):
    """Read and validate a metric-spec JSON file."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding='utf-8'))
    except OSError as exc:
        raise SpecError(f"cannot read metric spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"metric spec {path} is not valid JSON: {exc}") from exc
    spec = parse_metric_spec(payload)
    logger.info(f"Loaded metric spec '{spec.label}' (n={spec.n}, k={spec.k}) from {path}")
    return spec
