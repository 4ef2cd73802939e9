"""Precision-generic SGP4 near-Earth initialization and propagation.

The kernel follows the near-Earth theory of the public SGP4 equation
set (WGS72 constants by default) with two disciplines imposed
throughout:

* no input-dependent Python branches: every conditional is evaluated
  on both sides and resolved with a select, with operands guarded so
  the untaken side never produces NaN that could poison the result;
* no aborts: anomalous physical states compute to completion and are
  flagged via error codes, leaving validity filtering to the caller.

All element inputs may be scalars or broadcastable numpy arrays, and
the identical source instantiates at float32, float64, or with
:class:`~sgp4kit.dmath.Dual` operands for forward-mode derivatives.
Time is always supplied as minutes since the element epoch; absolute
time conversion lives in the 64-bit-only :func:`epoch_to_julian`
helper.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields as dataclass_fields
from typing import Any

import numpy as np

from . import dmath
from .dmath import value_of
from .gravity import WGS72, GravityModel
from .tle import MeanElements

TWOPI = 2.0 * math.pi
X2O3 = 2.0 / 3.0

KEPLER_MAX_ITER = 10
KEPLER_TOL = 1.0e-12
KEPLER_CLAMP = 0.95

DEEP_SPACE_PERIOD_MIN = 225.0


class ErrorCode(enum.IntEnum):
    OK = 0
    ECC_OUT_OF_RANGE = 1
    MEAN_MOTION_NONPOSITIVE = 2
    PERT_ECC_OUT_OF_RANGE = 3
    SEMILATUS_NEGATIVE = 4
    SUBORBITAL = 6
    DEEP_SPACE_UNSUPPORTED = 7


@dataclass(frozen=True)
class SatInit:
    """Initialization-derived constants consumed by the propagator.

    Fields are scalars for a single satellite or parallel arrays for a
    structure-of-arrays batch; either way the value is immutable and
    freely shareable across workers.
    """

    grav: GravityModel
    dtype: Any

    # copied mean elements
    no_kozai: Any
    ecco: Any
    inclo: Any
    nodeo: Any
    argpo: Any
    mo: Any
    bstar: Any

    # un-Kozai'd mean motion and geometry
    no_unkozai: Any
    ao: Any
    con41: Any
    x1mth2: Any
    x7thm1: Any

    # secular rates
    mdot: Any
    argpdot: Any
    nodedot: Any
    nodecf: Any

    # drag series
    isimp: Any
    cc1: Any
    cc4: Any
    cc5: Any
    d2: Any
    d3: Any
    d4: Any
    t2cof: Any
    t3cof: Any
    t4cof: Any
    t5cof: Any
    eta: Any
    omgcof: Any
    xmcof: Any
    delmo: Any
    sinmao: Any
    aycof: Any
    xlcof: Any

    error_code_at_init: Any


@dataclass(frozen=True)
class StateVector:
    """Position (km) and velocity (km/s) in the TEME frame."""

    r: Any  # (..., 3)
    v: Any  # (..., 3)
    error_code: Any


def _as_dtype(x, dtype):
    if isinstance(x, dmath.Dual):
        return x
    return np.asarray(x, dtype=dtype)


def _first_error(*flagged):
    """Combine (condition, code) pairs; the first true condition wins."""
    code = None
    for cond, value in reversed(flagged):
        cond = np.asarray(cond)
        if code is None:
            code = np.where(cond, np.int32(value), np.int32(0))
        else:
            code = np.where(cond, np.int32(value), code)
    return code


def sgp4_init(elems: MeanElements, grav: GravityModel = WGS72,
              dtype=np.float64) -> SatInit:
    """Compute all propagation constants from canonical mean elements.

    Never raises on anomalous element values; the returned
    ``error_code_at_init`` is nonzero instead (nonpositive mean motion,
    out-of-range eccentricity, deep-space period, or immediate decay
    detected by an internal epoch evaluation).
    """
    # flagged lanes evaluate out-of-range operands by design, so numpy
    # floating-point warnings here carry no signal
    with np.errstate(all="ignore"):
        return _sgp4_init(elems, grav, dtype)


def _sgp4_init(elems: MeanElements, grav: GravityModel,
               dtype) -> SatInit:
    is_dual = any(isinstance(getattr(elems, f), dmath.Dual)
                  for f in ("no_kozai", "ecco", "inclo", "nodeo",
                            "argpo", "mo", "bstar"))
    if is_dual:
        dtype = np.float64

    no_kozai = _as_dtype(elems.no_kozai, dtype)
    ecco = _as_dtype(elems.ecco, dtype)
    inclo = _as_dtype(elems.inclo, dtype)
    nodeo = _as_dtype(elems.nodeo, dtype)
    argpo = _as_dtype(elems.argpo, dtype)
    mo = _as_dtype(elems.mo, dtype)
    bstar = _as_dtype(elems.bstar, dtype)

    xke = dtype(grav.xke) if not is_dual else grav.xke
    j2 = grav.j2
    j3oj2 = grav.j3oj2
    j4 = grav.j4
    radiusearthkm = grav.radius_earth_km
    tiny = np.finfo(np.float64 if is_dual else dtype).tiny

    bad_n = value_of(no_kozai) <= 0.0
    bad_e = (value_of(ecco) >= 1.0) | (value_of(ecco) < -0.001)
    no_safe = dmath.where(bad_n, 1.0e-4, no_kozai)

    eccsq = ecco * ecco
    omeosq = dmath.maximum(1.0 - eccsq, tiny)
    rteosq = dmath.sqrt(omeosq)
    cosio = dmath.cos(inclo)
    cosio2 = cosio * cosio

    # un-Kozai the mean motion
    ak = dmath.power(xke / no_safe, X2O3)
    d1 = 0.75 * j2 * (3.0 * cosio2 - 1.0) / (rteosq * omeosq)
    del_ = d1 / (ak * ak)
    adel = ak * (1.0 - del_ * del_ - del_ * (1.0 / 3.0 + 134.0 * del_ * del_ / 81.0))
    del_ = d1 / (adel * adel)
    no_unkozai = no_safe / (1.0 + del_)

    deep_space = TWOPI / value_of(no_unkozai) >= DEEP_SPACE_PERIOD_MIN

    ao = dmath.power(xke / no_unkozai, X2O3)
    sinio = dmath.sin(inclo)
    po = ao * omeosq
    con42 = 1.0 - 5.0 * cosio2
    con41 = -con42 - cosio2 - cosio2
    posq = dmath.maximum(po * po, tiny)
    rp = ao * (1.0 - ecco)

    isimp = value_of(rp) < 220.0 / radiusearthkm + 1.0
    perige = (rp - 1.0) * radiusearthkm

    # s* and (q0 - s)^4 selection by perigee altitude
    ss = 78.0 / radiusearthkm + 1.0
    # cast: this operand chain has no element input, so without an
    # explicit dtype it would silently promote the drag series to f64
    qzms2ttemp = _as_dtype((120.0 - 78.0) / radiusearthkm,
                           np.float64 if is_dual else dtype)
    qzms2t = dmath.power(qzms2ttemp, 4.0)
    low_perige = value_of(perige) < 156.0
    sfour_low = dmath.where(value_of(perige) < 98.0,
                            _as_dtype(20.0, dtype) if not is_dual else 20.0 + 0.0 * perige,
                            perige - 78.0)
    qzms24temp = (120.0 - sfour_low) / radiusearthkm
    qzms24 = dmath.where(low_perige, dmath.power(qzms24temp, 4.0), qzms2t)
    sfour = dmath.where(low_perige, sfour_low / radiusearthkm + 1.0, ss)

    pinvsq = 1.0 / posq
    denom_tsi = ao - sfour
    denom_tsi = dmath.where(value_of(denom_tsi) == 0.0, tiny, denom_tsi)
    tsi = 1.0 / denom_tsi
    eta = ao * ecco * tsi
    etasq = eta * eta
    eeta = ecco * eta
    psisq = dmath.maximum(dmath.fabs(1.0 - etasq), tiny)
    coef = qzms24 * dmath.power(tsi, 4.0)
    coef1 = coef / dmath.power(psisq, 3.5)
    cc2 = coef1 * no_unkozai * (ao * (1.0 + 1.5 * etasq + eeta * (4.0 + etasq)) +
                                0.375 * j2 * tsi / psisq * con41 *
                                (8.0 + 3.0 * etasq * (8.0 + etasq)))
    cc1 = bstar * cc2
    ecc_small = value_of(ecco) <= 1.0e-4
    ecco_guard = dmath.maximum(ecco, 1.0e-4)
    cc3 = dmath.where(ecc_small, 0.0 * ecco,
                      -2.0 * coef * tsi * j3oj2 * no_unkozai * sinio / ecco_guard)
    x1mth2 = 1.0 - cosio2
    cc4 = 2.0 * no_unkozai * coef1 * ao * omeosq * \
        (eta * (2.0 + 0.5 * etasq) + ecco * (0.5 + 2.0 * etasq) -
         j2 * tsi / (ao * psisq) *
         (-3.0 * con41 * (1.0 - 2.0 * eeta + etasq * (1.5 - 0.5 * eeta)) +
          0.75 * x1mth2 * (2.0 * etasq - eeta * (1.0 + etasq)) *
          dmath.cos(2.0 * argpo)))
    cc5 = 2.0 * coef1 * ao * omeosq * (1.0 + 2.75 * (etasq + eeta) + eeta * etasq)
    cosio4 = cosio2 * cosio2
    temp1 = 1.5 * j2 * pinvsq * no_unkozai
    temp2 = 0.5 * temp1 * j2 * pinvsq
    temp3 = -0.46875 * j4 * pinvsq * pinvsq * no_unkozai
    mdot = no_unkozai + 0.5 * temp1 * rteosq * con41 + \
        0.0625 * temp2 * rteosq * (13.0 - 78.0 * cosio2 + 137.0 * cosio4)
    argpdot = (-0.5 * temp1 * con42 +
               0.0625 * temp2 * (7.0 - 114.0 * cosio2 + 395.0 * cosio4) +
               temp3 * (3.0 - 36.0 * cosio2 + 49.0 * cosio4))
    xhdot1 = -temp1 * cosio
    nodedot = xhdot1 + (0.5 * temp2 * (4.0 - 19.0 * cosio2) +
                        2.0 * temp3 * (3.0 - 7.0 * cosio2)) * cosio
    omgcof = bstar * cc3 * dmath.cos(argpo)
    eeta_guard = dmath.where(value_of(dmath.fabs(eeta)) < tiny, tiny, eeta)
    xmcof = dmath.where(ecc_small, 0.0 * ecco, -X2O3 * coef * bstar / eeta_guard)
    nodecf = 3.5 * omeosq * xhdot1 * cc1
    t2cof = 1.5 * cc1
    # guard against division by zero at inclination of 180 degrees
    xlcof_den = dmath.where(value_of(dmath.fabs(cosio + 1.0)) > 1.5e-12,
                            1.0 + cosio, _as_dtype(1.5e-12, dtype) if not is_dual
                            else 1.5e-12 + 0.0 * cosio)
    xlcof = -0.25 * j3oj2 * sinio * (3.0 + 5.0 * cosio) / xlcof_den
    aycof = -0.5 * j3oj2 * sinio
    delmotemp = 1.0 + eta * dmath.cos(mo)
    delmo = delmotemp * delmotemp * delmotemp
    sinmao = dmath.sin(mo)
    x7thm1 = 7.0 * cosio2 - 1.0

    # higher-order drag series, suppressed in simplified-drag mode
    cc1sq = cc1 * cc1
    d2_full = 4.0 * ao * tsi * cc1sq
    temp_d = d2_full * tsi * cc1 / 3.0
    d3_full = (17.0 * ao + sfour) * temp_d
    d4_full = 0.5 * temp_d * ao * tsi * (221.0 * ao + 31.0 * sfour) * cc1
    t3cof_full = d2_full + 2.0 * cc1sq
    t4cof_full = 0.25 * (3.0 * d3_full + cc1 * (12.0 * d2_full + 10.0 * cc1sq))
    t5cof_full = 0.2 * (3.0 * d4_full + 12.0 * cc1 * d3_full +
                        6.0 * d2_full * d2_full +
                        15.0 * cc1sq * (2.0 * d2_full + cc1sq))
    zero = 0.0 * cc1
    d2 = dmath.where(isimp, zero, d2_full)
    d3 = dmath.where(isimp, zero, d3_full)
    d4 = dmath.where(isimp, zero, d4_full)
    t3cof = dmath.where(isimp, zero, t3cof_full)
    t4cof = dmath.where(isimp, zero, t4cof_full)
    t5cof = dmath.where(isimp, zero, t5cof_full)

    error = _first_error(
        (bad_n, ErrorCode.MEAN_MOTION_NONPOSITIVE),
        (bad_e, ErrorCode.ECC_OUT_OF_RANGE),
        (deep_space, ErrorCode.DEEP_SPACE_UNSUPPORTED),
    )

    init = SatInit(
        grav=grav, dtype=dtype,
        no_kozai=no_kozai, ecco=ecco, inclo=inclo, nodeo=nodeo,
        argpo=argpo, mo=mo, bstar=bstar,
        no_unkozai=no_unkozai, ao=ao, con41=con41, x1mth2=x1mth2,
        x7thm1=x7thm1,
        mdot=mdot, argpdot=argpdot, nodedot=nodedot, nodecf=nodecf,
        isimp=isimp, cc1=cc1, cc4=cc4, cc5=cc5, d2=d2, d3=d3, d4=d4,
        t2cof=t2cof, t3cof=t3cof, t4cof=t4cof, t5cof=t5cof,
        eta=eta, omgcof=omgcof, xmcof=xmcof, delmo=delmo, sinmao=sinmao,
        aycof=aycof, xlcof=xlcof,
        error_code_at_init=error,
    )

    # evaluate at epoch so immediate decay is flagged at init, matching
    # the reference behaviour of propagating to t = 0 during setup
    at_epoch = _propagate(init, _as_dtype(0.0, dtype) if not is_dual else 0.0)
    error = np.where(error != 0, error, at_epoch.error_code)
    return SatInit(**{**{f.name: getattr(init, f.name)
                         for f in dataclass_fields(SatInit)},
                      "error_code_at_init": error})


def solve_kepler(axnl, aynl, u_init):
    """Newton-Raphson on SGP4's form of Kepler's equation.

    Fixed cap of 10 iterations, per-step correction clamped to 0.95,
    convergence at 1e-12 on the update; non-convergence returns the
    last iterate. Converged lanes of a batch are frozen so the result
    is independent of batch shape.
    """
    eo1 = u_init
    active = np.ones(np.broadcast(value_of(axnl), value_of(aynl),
                                  value_of(u_init)).shape, dtype=bool)
    for _ in range(KEPLER_MAX_ITER):
        if not active.any():
            break
        sineo1 = dmath.sin(eo1)
        coseo1 = dmath.cos(eo1)
        tem5 = 1.0 - coseo1 * axnl - sineo1 * aynl
        tem5 = (u_init - aynl * coseo1 + axnl * sineo1 - eo1) / tem5
        tem5 = dmath.where(value_of(tem5) >= KEPLER_CLAMP,
                           KEPLER_CLAMP + 0.0 * tem5,
                           dmath.where(value_of(tem5) <= -KEPLER_CLAMP,
                                       -KEPLER_CLAMP + 0.0 * tem5, tem5))
        eo1 = dmath.where(active, eo1 + tem5, eo1)
        active = active & (np.abs(value_of(tem5)) >= KEPLER_TOL)
    return eo1


def _propagate(init: SatInit, tsince) -> StateVector:
    grav = init.grav
    is_dual = isinstance(init.no_unkozai, dmath.Dual) or isinstance(tsince, dmath.Dual)
    dtype = np.float64 if is_dual else init.dtype
    tiny = np.finfo(dtype).tiny
    xke = grav.xke
    j2 = grav.j2
    radiusearthkm = grav.radius_earth_km
    vkmpersec = radiusearthkm * xke / 60.0

    t = tsince
    isimp = init.isimp

    # secular gravity and atmospheric drag
    xmdf = init.mo + init.mdot * t
    argpdf = init.argpo + init.argpdot * t
    nodedf = init.nodeo + init.nodedot * t
    t2 = t * t
    nodem = nodedf + init.nodecf * t2
    tempa = 1.0 - init.cc1 * t
    tempe = init.bstar * init.cc4 * t
    templ = init.t2cof * t2

    delomg = init.omgcof * t
    delmtemp = 1.0 + init.eta * dmath.cos(xmdf)
    delm = init.xmcof * (delmtemp * delmtemp * delmtemp - init.delmo)
    temp = delomg + delm
    mm_full = xmdf + temp
    argpm_full = argpdf - temp
    t3 = t2 * t
    t4 = t3 * t
    tempa_full = tempa - init.d2 * t2 - init.d3 * t3 - init.d4 * t4
    tempe_full = tempe + init.bstar * init.cc5 * (dmath.sin(mm_full) - init.sinmao)
    templ_full = templ + init.t3cof * t3 + t4 * (init.t4cof + t * init.t5cof)

    mm = dmath.where(isimp, xmdf, mm_full)
    argpm = dmath.where(isimp, argpdf, argpm_full)
    tempa = dmath.where(isimp, tempa, tempa_full)
    tempe = dmath.where(isimp, tempe, tempe_full)
    templ = dmath.where(isimp, templ, templ_full)

    nm = init.no_unkozai
    em = init.ecco
    inclm = init.inclo

    bad_nm = value_of(nm) <= 0.0
    nm_safe = dmath.where(bad_nm, 1.0e-4, nm)
    am = dmath.power(xke / nm_safe, X2O3) * tempa * tempa
    am_safe = dmath.maximum(am, tiny)
    nm = xke / dmath.power(am_safe, 1.5)
    em = em - tempe

    bad_em = (value_of(em) >= 1.0) | (value_of(em) < -0.001)
    # floor applied after the range check, as in the reference theory
    em = dmath.where(value_of(em) < 1.0e-6, 1.0e-6 + 0.0 * em, em)

    mm = mm + init.no_unkozai * templ
    xlm = mm + argpm + nodem

    nodem = dmath.mod_twopi_signed(nodem)
    argpm = argpm % TWOPI
    xlm = xlm % TWOPI
    mm = (xlm - argpm - nodem) % TWOPI

    sinip = dmath.sin(inclm)
    cosip = dmath.cos(inclm)

    # long period periodics
    ep = em
    xincp = inclm
    argpp = argpm
    nodep = nodem
    mp = mm

    axnl = ep * dmath.cos(argpp)
    pl_lp = am_safe * (1.0 - ep * ep)
    pl_lp = dmath.maximum(pl_lp, tiny)
    temp = 1.0 / pl_lp
    aynl = ep * dmath.sin(argpp) + temp * init.aycof
    xl = mp + argpp + nodep + temp * init.xlcof * axnl

    # solve Kepler's equation
    u = (xl - nodep) % TWOPI
    eo1 = solve_kepler(axnl, aynl, u)
    sineo1 = dmath.sin(eo1)
    coseo1 = dmath.cos(eo1)

    # short period preliminary quantities
    ecose = axnl * coseo1 + aynl * sineo1
    esine = axnl * sineo1 - aynl * coseo1
    el2 = axnl * axnl + aynl * aynl
    pl = am_safe * (1.0 - el2)
    bad_pl = value_of(pl) < 0.0
    pl_safe = dmath.maximum(pl, tiny)

    rl = am_safe * (1.0 - ecose)
    rl_safe = dmath.where(value_of(rl) == 0.0, tiny, rl)
    rdotl = dmath.sqrt(am_safe) * esine / rl_safe
    rvdotl = dmath.sqrt(pl_safe) / rl_safe
    betal = dmath.sqrt(dmath.maximum(1.0 - el2, tiny))
    temp = esine / (1.0 + betal)
    sinu = am_safe / rl_safe * (sineo1 - aynl - axnl * temp)
    cosu = am_safe / rl_safe * (coseo1 - axnl + aynl * temp)
    su = dmath.atan2(sinu, cosu)
    sin2u = (cosu + cosu) * sinu
    cos2u = 1.0 - 2.0 * sinu * sinu
    temp = 1.0 / pl_safe
    temp1 = 0.5 * j2 * temp
    temp2 = temp1 * temp

    # short period periodics
    mrt = rl * (1.0 - 1.5 * temp2 * betal * init.con41) + \
        0.5 * temp1 * init.x1mth2 * cos2u
    su = su - 0.25 * temp2 * init.x7thm1 * sin2u
    xnode = nodep + 1.5 * temp2 * cosip * sin2u
    xinc = xincp + 1.5 * temp2 * cosip * sinip * cos2u
    mvt = rdotl - nm * temp1 * init.x1mth2 * sin2u / xke
    rvdot = rvdotl + nm * temp1 * (init.x1mth2 * cos2u + 1.5 * init.con41) / xke

    # orientation vectors
    sinsu = dmath.sin(su)
    cossu = dmath.cos(su)
    snod = dmath.sin(xnode)
    cnod = dmath.cos(xnode)
    sini = dmath.sin(xinc)
    cosi = dmath.cos(xinc)
    xmx = -snod * cosi
    xmy = cnod * cosi
    ux = xmx * sinsu + cnod * cossu
    uy = xmy * sinsu + snod * cossu
    uz = sini * sinsu
    vx = xmx * cossu - cnod * sinsu
    vy = xmy * cossu - snod * sinsu
    vz = sini * cossu

    mr = mrt * radiusearthkm
    rx = mr * ux
    ry = mr * uy
    rz = mr * uz
    vxo = (mvt * ux + rvdot * vx) * vkmpersec
    vyo = (mvt * uy + rvdot * vy) * vkmpersec
    vzo = (mvt * uz + rvdot * vz) * vkmpersec

    decayed = value_of(mrt) < 1.0

    error = _first_error(
        (bad_nm, ErrorCode.MEAN_MOTION_NONPOSITIVE),
        (bad_em, ErrorCode.ECC_OUT_OF_RANGE),
        (bad_pl, ErrorCode.SEMILATUS_NEGATIVE),
        (decayed, ErrorCode.SUBORBITAL),
    )

    if is_dual:
        r = (rx, ry, rz)
        v = (vxo, vyo, vzo)
    else:
        r = np.stack(np.broadcast_arrays(rx, ry, rz), axis=-1)
        v = np.stack(np.broadcast_arrays(vxo, vyo, vzo), axis=-1)
    return StateVector(r=r, v=v, error_code=error)


def sgp4_propagate(init: SatInit, tsince_min) -> StateVector:
    """Propagate to ``tsince_min`` minutes since epoch.

    Broadcasts over both the element arrays in ``init`` and the time
    array; scalar in, scalar out. Always runs to completion; anomalous
    states carry a nonzero ``error_code`` with values retained.
    """
    with np.errstate(all="ignore"):
        return _sgp4_propagate(init, tsince_min)


def _sgp4_propagate(init: SatInit, tsince_min) -> StateVector:
    is_dual = isinstance(init.no_unkozai, dmath.Dual) or isinstance(tsince_min, dmath.Dual)
    if not is_dual:
        tsince_min = np.asarray(tsince_min, dtype=init.dtype)
    result = _propagate(init, tsince_min)
    # structural init codes take precedence in the reported state; an
    # epoch decay (code 6 at init) is per-cell and is recomputed here
    init_err = np.asarray(init.error_code_at_init)
    persistent = np.where(init_err == int(ErrorCode.SUBORBITAL), 0, init_err)
    error = np.where(persistent != 0, persistent, result.error_code)
    return StateVector(r=result.r, v=result.v, error_code=error)


_DAYS_BEFORE_MONTH = (0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334)


def _is_leap(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def epoch_to_julian(epoch_year: int, epoch_day_int: int,
                    epoch_day_frac: float) -> float:
    """Julian date of a split TLE epoch. 64-bit only, by design.

    Convenience for absolute-time workflows; the kernel itself never
    reconstructs absolute epochs and takes minutes-since-epoch instead.
    """
    days_in_year = 366 if _is_leap(epoch_year) else 365
    if not 1 <= epoch_day_int <= days_in_year:
        raise ValueError(
            f"day {epoch_day_int} out of range for year {epoch_year}")
    # Gregorian date of January 0.0 of the epoch year
    y = epoch_year - 1
    jd0 = (1721424.5 + 365 * y + y // 4 - y // 100 + y // 400)
    return jd0 + float(epoch_day_int) + float(epoch_day_frac)
