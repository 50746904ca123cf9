from typing import Literal

from pydantic import BaseModel

Symmetry = Literal["symmetric", "asymmetric", "undetermined"]
Count = int | list[int]


class GenusCheck(BaseModel):
    condition: str
    holds: bool | None  # None: condition not applicable
    detail: str


class GenusReport(BaseModel):
    signature: list[int]
    discriminant: str
    determinant: int


class CertificateReport(BaseModel):
    exists: bool
    unique_in_genus: Literal["unique", "unknown", "not_applicable"]
    aut_onto: Literal["unique_and_onto", "unknown", "not_applicable"]
    square_two_guaranteed: bool


class ComplementReport(BaseModel):
    genus: GenusReport
    representatives: list[str] | None = None
    certificate: CertificateReport | None = None
    genus_checks: list[GenusCheck]


class TypeReport(BaseModel):
    N: str
    coset_id: int
    symmetry: Symmetry
    reason: str


class ConfigurationReport(BaseModel):
    kernel_order: int
    kernel_invariants: list[int]
    kernel_generators: list[list[int]]
    index: int
    s_tilde_discr: str
    complement: ComplementReport
    types: list[TypeReport]
    types_certified: bool
    reducible: bool
    abundant: bool | None
    class_count: Count


class ZariskiReport(BaseModel):
    e: int
    a: list[int]
    n: int
    virtual_genus: int


class ClassificationReport(BaseModel):
    sigma: str
    mu: int
    configurations: list[ConfigurationReport]
    class_count: Count
    irreducible_class_count: Count
    fast_path: bool
    zariski: ZariskiReport | None
    virtual_genus_convention: Literal["floor"] = "floor"


def add_counts(counts: list[Count]) -> Count:
    """Sum exact counts and [low, high] intervals; exact when every term is."""
    low = sum(c[0] if isinstance(c, list) else c for c in counts)
    high = sum(c[1] if isinstance(c, list) else c for c in counts)
    return low if low == high else [low, high]
