"""Cavity geometry and lead-channel definitions.

A cavity is the set of sites retained from an ``nx`` by ``ny`` rectangular
tight-binding lattice: nearest-neighbor hopping -1 in units of the cavity
hopping, site-diagonal onsite energies, optional mask removing sites. Two
semi-infinite one-dimensional leads, L and R, attach at retained contact
sites (possibly the same site, as in a one-site cavity fed from both sides).
Each lead carries a single channel with dispersion E = -2 t cos k (t the
lead hopping), so its propagation band is |E| < 2 t.

The closed-cavity Hamiltonian H_B, the lead surface Green's function g(E),
the channel self-energy w^2 g(E) and the energy-dependent contact amplitudes
a(E) are defined here. They obey 2 pi a(E)^2 = -2 Im[w^2 g(E)] exactly,
which ties the resonance widths of the effective Hamiltonian to the
transmission normalization. The effective Hamiltonian itself is assembled in
:mod:`opencavity.spectrum`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidGeometry, OutsideBand

__all__ = [
    "LatticeSpec",
    "LeadSpec",
    "LeadChannel",
    "CavityModel",
    "build_hb",
    "surface_green",
    "lead_self_energy",
    "lead_contact_amplitude",
]


def _as_grid(value, nx, ny, name):
    """Normalize a scalar or (nx, ny) nested sequence to a nested tuple."""
    if np.isscalar(value):
        v = float(value)
        return tuple(tuple(v for _ in range(ny)) for _ in range(nx))
    rows = tuple(tuple(float(x) for x in row) for row in value)
    if len(rows) != nx or any(len(r) != ny for r in rows):
        raise InvalidGeometry(f"{name} must be scalar or shape ({nx}, {ny})")
    return rows


@dataclass(frozen=True)
class LatticeSpec:
    """Rectangular lattice with optional site mask.

    Parameters
    ----------
    nx, ny : int
        Grid extent, both at least 1.
    onsite : float or nested sequence
        Site energy in hopping units, scalar or per-site (nx, ny).
    mask : nested sequence or None
        Truthy entries mark retained sites, shape (nx, ny). None keeps all.
    hopping : float
        Magnitude of the nearest-neighbor matrix element; fixes the energy
        unit and defaults to 1. The bond value in H_B is ``-hopping``.
    """

    nx: int
    ny: int
    onsite: object = 0.0
    mask: object = None
    hopping: float = 1.0

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.ny) != self.ny:
            raise InvalidGeometry("nx and ny must be integers")
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "ny", int(self.ny))
        if self.nx < 1 or self.ny < 1:
            raise InvalidGeometry("nx and ny must be at least 1")
        if not (float(self.hopping) > 0.0):
            raise InvalidGeometry("hopping must be positive")
        object.__setattr__(self, "hopping", float(self.hopping))
        object.__setattr__(
            self, "onsite", _as_grid(self.onsite, self.nx, self.ny, "onsite")
        )
        if self.mask is not None:
            rows = tuple(tuple(bool(x) for x in row) for row in self.mask)
            if len(rows) != self.nx or any(len(r) != self.ny for r in rows):
                raise InvalidGeometry(f"mask must have shape ({self.nx}, {self.ny})")
            object.__setattr__(self, "mask", rows)

    def sites(self):
        """Retained sites as (ix, iy) pairs, lexicographic order."""
        return tuple(
            (ix, iy)
            for ix in range(self.nx)
            for iy in range(self.ny)
            if self.mask is None or self.mask[ix][iy]
        )


@dataclass(frozen=True)
class LeadSpec:
    """One semi-infinite lead.

    Parameters
    ----------
    contact : (int, int)
        Lattice coordinates of the cavity site the lead attaches to.
    coupling_w : float
        Bare coupling matrix element w between lead and contact site,
        non-negative; the effective coupling is alpha * coupling_w. Zero
        detaches the channel while keeping it declared.
    lead_hopping : float
        Hopping inside the lead chain; fixes the band |E| < 2t and defaults
        to 1 like the cavity hopping.
    name : str
        Channel label; when empty, position assigns "L" to the first lead
        and "R" to the second.
    """

    contact: tuple
    coupling_w: float
    lead_hopping: float = 1.0
    name: str = ""

    def __post_init__(self):
        c = tuple(int(v) for v in self.contact)
        if len(c) != 2:
            raise InvalidGeometry("contact must be an (ix, iy) pair")
        object.__setattr__(self, "contact", c)
        if not (float(self.coupling_w) >= 0.0):
            raise InvalidGeometry("coupling_w must be non-negative")
        object.__setattr__(self, "coupling_w", float(self.coupling_w))
        if not (float(self.lead_hopping) > 0.0):
            raise InvalidGeometry("lead_hopping must be positive")
        object.__setattr__(self, "lead_hopping", float(self.lead_hopping))


def surface_green(energy, lead_hopping=1.0):
    """Surface Green's function of a semi-infinite chain at real energy.

    Inside the band |E| <= 2t this is (E - i sqrt(4 t^2 - E^2)) / (2 t^2);
    outside, the branch decaying into the lead,
    (E - sign(E) sqrt(E^2 - 4 t^2)) / (2 t^2). The two agree at the band
    edges, where g(+-2t) = +-1/t, and Im g <= 0 everywhere (retarded
    branch, so widths come out positive).

    Parameters
    ----------
    energy : float
    lead_hopping : float

    Returns
    -------
    complex
    """
    t = float(lead_hopping)
    e = float(energy)
    if abs(e) <= 2.0 * t:
        return complex(e, -math.sqrt(4.0 * t * t - e * e)) / (2.0 * t * t)
    return complex(e - math.copysign(math.sqrt(e * e - 4.0 * t * t), e)) / (
        2.0 * t * t
    )


def lead_self_energy(lead: LeadSpec, alpha, energy):
    """Channel self-energy w^2 g(E) with w = alpha * coupling_w.

    Total function of real energy; outside the band it continues onto the
    decaying branch, so bound-state poles stay on the physical sheet.
    """
    w = float(alpha) * lead.coupling_w
    return w * w * surface_green(energy, lead.lead_hopping)


def _contact_amplitude(energy, coupling, lead_hopping):
    t = float(lead_hopping)
    e = float(energy)
    if abs(e) >= 2.0 * t:
        raise OutsideBand(f"energy {e} outside the open channel band (|E| < {2 * t})")
    im_g = math.sqrt(4.0 * t * t - e * e) / (2.0 * t * t)
    return float(coupling) * math.sqrt(im_g / math.pi)


def lead_contact_amplitude(lead: LeadSpec, alpha, energy):
    """Channel coupling amplitude a(E) at real energy inside the band.

    Defined by a(E) = alpha * coupling_w * sqrt(-Im g(E) / pi), which makes
    2 pi a(E)^2 = -2 Im[w^2 g(E)] an identity. For unit lead hopping this is
    the familiar w sqrt(sin k / pi) with E = -2 cos k. Real and
    non-negative.

    Raises
    ------
    OutsideBand
        |E| >= 2t; the channel does not propagate there.
    """
    return _contact_amplitude(energy, float(alpha) * lead.coupling_w,
                              lead.lead_hopping)


@dataclass(frozen=True)
class LeadChannel:
    """Lead resolved against a concrete cavity basis.

    ``index`` addresses the contact site in the H_B basis and ``w_eff`` is
    the coupling after the global scale alpha. ``self_energy`` and
    ``contact_amplitude`` are the per-channel energy functions entering the
    effective Hamiltonian and the transmission normalization.
    """

    name: str
    site: tuple
    index: int
    coupling_w: float
    lead_hopping: float
    w_eff: float

    def self_energy(self, energy):
        return self.w_eff**2 * surface_green(energy, self.lead_hopping)

    def contact_amplitude(self, energy):
        return _contact_amplitude(energy, self.w_eff, self.lead_hopping)


def build_hb(lattice: LatticeSpec):
    """Assemble the closed-cavity Hamiltonian.

    Parameters
    ----------
    lattice : LatticeSpec

    Returns
    -------
    (ndarray, tuple)
        Real symmetric matrix over the retained sites, and the site order
        (tuple of (ix, iy)) indexing its basis.

    Raises
    ------
    InvalidGeometry
        No sites retained, or the retained sites are not edge-connected.
    """
    sites = lattice.sites()
    if not sites:
        raise InvalidGeometry("mask retains no sites")
    pos = {s: i for i, s in enumerate(sites)}
    n = len(sites)
    h = np.zeros((n, n))
    for (ix, iy), i in pos.items():
        h[i, i] = lattice.onsite[ix][iy]
        for jx, jy in ((ix + 1, iy), (ix, iy + 1)):
            j = pos.get((jx, jy))
            if j is not None:
                h[i, j] = h[j, i] = -lattice.hopping

    # Flood fill over bonds; every retained site must be reachable.
    seen = {sites[0]}
    queue = [sites[0]]
    while queue:
        ix, iy = queue.pop()
        for nb in ((ix + 1, iy), (ix - 1, iy), (ix, iy + 1), (ix, iy - 1)):
            if nb in pos and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    if len(seen) != n:
        raise InvalidGeometry(
            f"cavity splits into disconnected parts ({len(seen)} of {n} sites reached)"
        )
    return h, sites


class CavityModel:
    """Cavity plus two leads at a global coupling strength alpha.

    Parameters
    ----------
    lattice : LatticeSpec
    leads : sequence of exactly two LeadSpec
        Contacts must be retained sites; both leads may share one site.
    alpha : float
        Global coupling scale, non-negative. The channel self-energy uses
        w_eff = alpha * coupling_w.
    """

    def __init__(self, lattice, leads, alpha):
        leads = tuple(leads)
        if len(leads) != 2:
            raise InvalidGeometry("exactly two leads are required")
        if not (float(alpha) >= 0.0) or not math.isfinite(float(alpha)):
            raise InvalidGeometry("alpha must be finite and non-negative")
        self.lattice = lattice
        self.leads = leads
        self.alpha = float(alpha)

        h, sites = build_hb(lattice)
        h.flags.writeable = False
        self._h_b = h
        self.site_order = sites
        pos = {s: i for i, s in enumerate(sites)}

        channels = []
        for default_name, lead in zip(("L", "R"), leads):
            if lead.contact not in pos:
                raise InvalidGeometry(
                    f"lead contact {lead.contact} is not a retained site"
                )
            channels.append(
                LeadChannel(
                    name=lead.name or default_name,
                    site=lead.contact,
                    index=pos[lead.contact],
                    coupling_w=lead.coupling_w,
                    lead_hopping=lead.lead_hopping,
                    w_eff=self.alpha * lead.coupling_w,
                )
            )
        self.channels = tuple(channels)

    @property
    def dimension(self):
        return self._h_b.shape[0]

    @property
    def h_b(self):
        """Closed-cavity Hamiltonian (read-only view)."""
        return self._h_b

    @property
    def contact_indices(self):
        return tuple(ch.index for ch in self.channels)

    def with_alpha(self, alpha):
        """Same geometry and leads at a different coupling strength."""
        return CavityModel(self.lattice, self.leads, alpha)

    def self_energy_weights(self, energy):
        """Per-channel w_eff^2 g(E), the diagonal self-energy amplitudes."""
        return np.array(
            [ch.self_energy(energy) for ch in self.channels], dtype=complex
        )

    def channel_amplitudes(self, energy):
        """Per-channel contact amplitudes a_C(E); OutsideBand past any edge."""
        return np.array([ch.contact_amplitude(energy) for ch in self.channels])

    def __repr__(self):
        return (
            f"CavityModel(n={self.dimension}, "
            f"channels={len(self.channels)}, alpha={self.alpha:g})"
        )
