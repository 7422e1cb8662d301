"""Pydantic row models for the experiment tables.

The field order of each model is the column order of its CSV. Exact rationals
are written as ``p/q`` strings.
"""

from enum import Enum
from typing import Union

from pydantic import BaseModel


class ObservableName(str, Enum):
    ONE = "one"
    BUMP = "bump"
    CUSP = "cusp"


# cfe
class CfeRow(BaseModel):
    index: int
    quotient: int
    orbit_point: str
    convergent: str


# orbit-measure
class AtomRow(BaseModel):
    m: int
    mode: str
    atom: str
    weight: str


# coprime
class CoprimeRow(BaseModel):
    m: int
    lo: str
    hi: str
    count: int
    expected: str
    slack: str
    bound: int
    holds: bool


# horocycle
class HorocycleCellRow(BaseModel):
    t: float
    cell_re: Union[float, str]
    cell_im: Union[float, str]
    observed: float
    expected: float


# shear
class CellRow(BaseModel):
    cell_re: Union[float, str]
    cell_im: Union[float, str]
    observed: float
    expected: float


# window
class WindowRow(BaseModel):
    x: float
    value: float
    horocycle_value: float
    deviation: float
    budget: float
    within_budget: bool


# identities
class IdentityRow(BaseModel):
    identity: str
    cases: int
    max_residual: float
    tolerance: float
    holds: bool


# padic
class PadicCheckRow(BaseModel):
    check: str
    parameter: str
    cases: int
    passed: int


# mirror
class MirrorRow(BaseModel):
    m: int
    n: int
    n_prime: int
    product_mod_m: int
    time_reflection: bool


# kuzmin
class DigitCountRow(BaseModel):
    digit: str
    count: int


class DigitRow(BaseModel):
    digit: str
    count: int
    frequency: float
    reference: float


# heights
class HeightRow(BaseModel):
    t: float
    height: float
    expected: float
    error: float
    shortest_x: int
    shortest_y: int


# geodesic
class RunRow(BaseModel):
    index: int
    kind: str
    length: int
