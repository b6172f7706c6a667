"""Shared test helpers: synthetic decoy tables and an independently coded
uncorrelated rate pipeline used as the identity oracle."""

import math

import numpy as np
import pytest

from mdiqkd_corr import ChannelParams, IntensityProtocol, poisson_pmf
from mdiqkd_corr.channel_model import gain_qber_tables
from mdiqkd_corr.decoy_analysis import GainQberTable


@pytest.fixture(scope="session")
def default_protocol():
    return IntensityProtocol(mu=0.207, nu=0.035, omega=1e-4)


@pytest.fixture(scope="session")
def default_channel():
    return ChannelParams()


def forward_tables(protocol, rng, n_max=25):
    """Synthetic gain/QBER tables generated from random per-photon-number
    yields and error probabilities (zero beyond the cutoff), plus the exact
    single-photon values they embed."""
    y = rng.random((n_max + 1, n_max + 1))
    h = rng.random((n_max + 1, n_max + 1)) * y
    q = np.empty((3, 3))
    qe = np.empty((3, 3))
    for i, a in enumerate(protocol.intensities):
        pa = np.array([poisson_pmf(n, a) for n in range(n_max + 1)])
        for j, b in enumerate(protocol.intensities):
            pb = np.array([poisson_pmf(m, b) for m in range(n_max + 1)])
            q[i, j] = pa @ y @ pb
            qe[i, j] = pa @ h @ pb
    e = np.where(q > 0.0, qe / np.maximum(q, 1e-300), 0.0)
    table = GainQberTable("Z", q, e)
    return table, float(y[1, 1]), float(h[1, 1])


def uncorrelated_rate(protocol, ch):
    """Uncorrelated decoy MDI pipeline coded independently of the engine:
    point-value Gaussian elimination, overlap fixed to one."""
    z, x = gain_qber_tables(protocol, ch)
    mu, nu, om = protocol.intensities

    def y11_point(t):
        e2n, e2o, e2m = math.exp(2 * nu), math.exp(2 * om), math.exp(2 * mu)
        eno, emo = math.exp(nu + om), math.exp(mu + om)
        qm1 = t.q[1, 1] * e2n + t.q[2, 2] * e2o - t.q[1, 2] * eno - t.q[2, 1] * eno
        qm2 = t.q[0, 0] * e2m + t.q[2, 2] * e2o - t.q[0, 2] * emo - t.q[2, 0] * emo
        num = (mu**2 - om**2) * (mu - om) * qm1 - (nu**2 - om**2) * (nu - om) * qm2
        return min(max(num / ((mu - om) ** 2 * (nu - om) ** 2 * (mu - nu)), 0.0), 1.0)

    def h11_point(t):
        qe = t.q * t.e
        num = (
            math.exp(2 * nu) * qe[1, 1]
            + math.exp(2 * om) * qe[2, 2]
            - math.exp(nu + om) * (qe[1, 2] + qe[2, 1])
        )
        return min(max(num / (nu - om) ** 2, 0.0), 1.0)

    def h2(v):
        if v <= 0.0 or v >= 1.0:
            return 0.0
        return -v * math.log2(v) - (1.0 - v) * math.log2(1.0 - v)

    y11z = y11_point(z)
    y11x = y11_point(x)
    h11x = h11_point(x)
    ratio = 0.5 if y11x <= 0.0 else min(max(h11x / y11x, 0.0), 0.5)
    probs = protocol.probabilities
    p11 = protocol.q_z_alice * protocol.q_z_bob * sum(
        wa * wb * poisson_pmf(1, a) * poisson_pmf(1, b)
        for a, wa in zip(protocol.intensities, probs)
        for b, wb in zip(protocol.intensities, probs)
    )
    rate = p11 * y11z * (1.0 - h2(ratio)) - z.q[0, 0] * ch.f_ec * h2(z.e[0, 0])
    return max(rate, 0.0)
