import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caged import gauge, graphs
from caged.errors import InvalidParameterError, ResourceLimitError

TWO_PI = 2.0 * math.pi

growth_sequences = st.lists(st.integers(1, 4), min_size=1, max_size=3).map(
    lambda xs: tuple(xs[:-1]) + (max(xs[-1], 2),))


def spectrum_of(m):
    return np.linalg.eigvalsh(gauge.dense_matrix(m))


class TestPhaseVectors:
    def test_two_branch_at_pi(self):
        v = gauge.canonical_phase_vector((2,), 1, math.pi)
        assert v.entries == pytest.approx((cmath.exp(1j * math.pi / 4),
                                           cmath.exp(-1j * math.pi / 4)))
        assert abs(gauge.phase_pairing(v)) < 1e-12

    def test_pairing_at_zero_flux_counts_branches(self):
        v = gauge.canonical_phase_vector((2,), 1, 0.0)
        assert gauge.phase_pairing(v) == pytest.approx(2.0)

    def test_three_branch_vanishing(self):
        v = gauge.canonical_phase_vector((3,), 1, TWO_PI / 3)
        assert abs(gauge.phase_pairing(v)) < 1e-12

    def test_four_branch_vanishing(self):
        v = gauge.canonical_phase_vector((4,), 1, math.pi / 2)
        assert abs(gauge.phase_pairing(v)) < 1e-12

    def test_unit_branch_is_one(self):
        v = gauge.canonical_phase_vector((1, 2), 1, 1.234)
        assert v.entries == (1 + 0j,)

    def test_entries_unit_modulus(self):
        v = gauge.canonical_phase_vector((2, 3, 2), 2, 0.77)
        assert all(abs(abs(e) - 1.0) < 1e-12 for e in v.entries)
        assert len(v.entries) == 3

    def test_level_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            gauge.canonical_phase_vector((2, 2), 3, 0.1)

    @pytest.mark.parametrize("xs", [(2,), (3,), (2, 2), (2, 3), (3, 2), (2, 2, 2)])
    def test_pairing_vanishing_iff(self, xs):
        """The self-pairing at level i dies exactly on the nontrivial lattice
        of flux values 2*pi*z / prod_{j<=i} x_j with x_i not dividing z."""
        for i in range(1, len(xs) + 1):
            prod = math.prod(xs[:i])
            for z in range(1, prod + 1):
                phi = TWO_PI * z / prod
                pairing = gauge.phase_pairing(gauge.canonical_phase_vector(xs, i, phi))
                if z % xs[i - 1] == 0:
                    assert abs(pairing) > 1e-6, (xs, i, z)
                else:
                    assert abs(pairing) < 1e-10, (xs, i, z)
            for z in range(prod):
                phi = TWO_PI * (z + 0.5) / prod
                pairing = gauge.phase_pairing(gauge.canonical_phase_vector(xs, i, phi))
                assert abs(pairing) > 1e-6


class TestCanonicalCcam:
    def test_zero_flux_is_plain_adjacency(self):
        m = gauge.canonical_ccam((2,), 0.0)
        assert all(t == 0.0 for (_u, _v, t) in m.entries)
        assert sorted((u, v) for (u, v, _t) in m.entries) == list(graphs.shrub(2).edges)

    def test_all_plaquettes_carry_pi(self):
        m = gauge.canonical_ccam((2,), math.pi)
        for f in gauge.all_plaquette_fluxes(m):
            assert f == pytest.approx(math.pi)

    @given(growth_sequences, st.floats(-6.0, 6.0))
    @settings(max_examples=60, deadline=None)
    def test_flux_uniformity(self, xs, phi):
        m = gauge.canonical_ccam(xs, phi)
        for f in gauge.all_plaquette_fluxes(m):
            assert abs(gauge.reduce_angle(f - phi)) < 1e-10

    def test_fig_arrow_pattern_232(self):
        """Phases come in four magnitudes: 0, phi/4 (level 1), phi (level 2),
        and 3*phi/2 (level 3)."""
        phi = 0.9
        m = gauge.canonical_ccam((2, 3, 2), phi)
        counts = {}
        for (_u, _v, t) in m.entries:
            key = round(abs(gauge.reduce_angle(t)) / phi, 6)
            counts[key] = counts.get(key, 0) + 1
        assert counts == {0.25: 24, 1.0: 8, 0.0: 4, 1.5: 4}

    def test_roots_marked(self):
        m = gauge.canonical_ccam((2, 3), 1.0)
        assert m.first_vertex == 0
        assert m.last_vertex == m.dimension - 1


class TestPlaquetteFlux:
    def test_reversed_loop_negates(self):
        m = gauge.canonical_ccam((3, 2), 0.7)
        loop = m.graph.plaquettes[0]
        fwd = gauge.plaquette_flux(m, loop)
        bwd = gauge.plaquette_flux(m, tuple(reversed(loop)))
        assert fwd == pytest.approx(-bwd)
        assert fwd == pytest.approx(0.7)

    def test_non_edge_rejected(self):
        m = gauge.canonical_ccam((2,), 0.0)
        with pytest.raises(InvalidParameterError):
            gauge.plaquette_flux(m, (0, 3, 1, 2))

    def test_range_is_half_open(self):
        m = gauge.canonical_ccam((2,), math.pi)
        f = gauge.plaquette_flux(m, m.graph.plaquettes[0])
        assert -math.pi < f <= math.pi


class TestGaugeTransform:
    def test_identity(self):
        m = gauge.canonical_ccam((2, 2), 0.9)
        assert gauge.gauge_transform(m, 3, 0.0).entries == m.entries

    @given(st.integers(0, 9), st.floats(-6.0, 6.0))
    @settings(max_examples=40, deadline=None)
    def test_spectrum_preserved(self, w, gamma):
        m = gauge.canonical_ccam((2, 2), 1.1)
        t = gauge.gauge_transform(m, w, gamma)
        assert np.max(np.abs(spectrum_of(m) - spectrum_of(t))) < 1e-10

    @given(st.integers(0, 13), st.floats(-6.0, 6.0))
    @settings(max_examples=40, deadline=None)
    def test_fluxes_preserved(self, w, gamma):
        m = gauge.canonical_ccam((2, 3), 0.8)
        t = gauge.gauge_transform(m, w, gamma)
        assert gauge.all_plaquette_fluxes(t) == pytest.approx(
            gauge.all_plaquette_fluxes(m))

    def test_single_edge_gauge_is_equivalent(self):
        """The rhombus with all its flux on one edge matches the spread-out
        gauge face by face, hence also in spectrum."""
        phi = 1.3
        spread = gauge.canonical_ccam((2,), phi)
        lumped = gauge.Ccam(
            dimension=4,
            entries=((0, 1, phi), (0, 2, 0.0), (1, 3, 0.0), (2, 3, 0.0)),
            first_vertex=0, last_vertex=3, flux=phi, graph=spread.graph)
        assert gauge.plaquette_flux(lumped, spread.graph.plaquettes[0]) == pytest.approx(
            gauge.plaquette_flux(spread, spread.graph.plaquettes[0]))
        assert np.max(np.abs(spectrum_of(lumped) - spectrum_of(spread))) < 1e-10


class TestFlatValues:
    def test_two(self):
        fv = gauge.flat_values((2,))
        assert fv.denominator == 2
        assert fv.values == pytest.approx((math.pi, TWO_PI))

    def test_232_multiples_of_pi_over_six(self):
        fv = gauge.flat_values((2, 3, 2))
        assert fv.denominator == 12
        assert fv.values == pytest.approx(tuple(math.pi / 6 * z for z in range(1, 13)))

    def test_depends_only_on_product(self):
        a = gauge.flat_values((4, 3)).values
        b = gauge.flat_values((2, 6)).values
        c = gauge.flat_values((12,)).values
        assert a == pytest.approx(b)
        assert a == pytest.approx(c)

    def test_closed_under_step_mod_two_pi(self):
        fv = gauge.flat_values((2, 3))
        step = TWO_PI / fv.denominator
        for v in fv.values:
            assert fv.contains(math.fmod(v + step, TWO_PI))

    def test_membership_tolerance(self):
        fv = gauge.flat_values((2, 3, 2))
        assert fv.contains(math.pi / 6 + 5e-10)
        assert not fv.contains(math.pi / 6 + 1e-3)
        assert not fv.contains(math.pi / 12)

    def test_midpoints_not_members(self):
        fv = gauge.flat_values((2, 2))
        assert all(not fv.contains(mid) for mid in fv.midpoints())


class TestDenseMatrix:
    def test_shrub_row_sums(self):
        m = gauge.dense_matrix(gauge.canonical_ccam((2,), 0.0))
        assert m[0].sum() == pytest.approx(2.0)

    def test_hermitian_exactly(self):
        m = gauge.dense_matrix(gauge.canonical_ccam((2, 3), 2.1))
        assert np.max(np.abs(m - m.conj().T)) == 0.0

    def test_pi_flux_eigenvalues(self):
        vals = np.linalg.eigvalsh(gauge.dense_matrix(gauge.canonical_ccam((2,), math.pi)))
        assert vals == pytest.approx([-math.sqrt(2), -math.sqrt(2),
                                      math.sqrt(2), math.sqrt(2)])

    def test_limit_env_override(self, monkeypatch):
        monkeypatch.setenv(gauge.DENSE_LIMIT_ENV, "3")
        with pytest.raises(ResourceLimitError):
            gauge.dense_matrix(gauge.canonical_ccam((2,), 0.0))
        monkeypatch.setenv(gauge.DENSE_LIMIT_ENV, "64")
        assert gauge.dense_matrix(gauge.canonical_ccam((2,), 0.0)).shape == (4, 4)


class TestDerivedCcams:
    def test_chain_fluxes(self):
        m = gauge.chain_ccam((2, 3), 3, 0.66)
        for f in gauge.all_plaquette_fluxes(m):
            assert abs(gauge.reduce_angle(f - 0.66)) < 1e-10

    def test_lotus_fluxes_follow_signs(self):
        patch = graphs.lotus_patch(graphs.LotusSpec(kind="first", sides=6))
        m = gauge.lotus_ccam(patch, 0.9)
        fluxes = gauge.all_plaquette_fluxes(m)
        for f, s in zip(fluxes, patch.plaquette_signs):
            assert abs(gauge.reduce_angle(f - s * 0.9)) < 1e-9

    def test_plain_graph_needs_signs(self):
        g = graphs.grow_tree((2,))
        with pytest.raises(InvalidParameterError):
            gauge.lotus_ccam(g, 1.0)

    def test_flux_solver_round_trip(self):
        g = graphs.grow_tree((2, 2))
        want = [0.3 * (i + 1) for i in range(len(g.plaquettes))]
        m = gauge.ccam_with_plaquette_fluxes(g, want)
        got = [gauge.plaquette_flux(m, cyc) for cyc in g.plaquettes]
        assert got == pytest.approx(want)


class TestFluxPeriodicityBoundary:
    """The 2*pi endpoint of the flat set is gauge-equivalent to zero flux."""

    def test_full_turn_matches_zero_flux_spectrum(self):
        at_zero = spectrum_of(gauge.canonical_ccam((2,), 0.0))
        at_turn = spectrum_of(gauge.canonical_ccam((2,), TWO_PI))
        assert np.max(np.abs(at_zero - at_turn)) < 1e-10

    def test_full_turn_is_crossable(self):
        m = gauge.dense_matrix(gauge.canonical_ccam((2,), TWO_PI))
        assert abs((m @ m)[3, 0]) == pytest.approx(2.0)


class TestCcamFile:
    def test_round_trip(self):
        m = gauge.canonical_ccam((2, 3), 1.25)
        text = gauge.format_ccam(m)
        back = gauge.parse_ccam(text)
        assert back.dimension == m.dimension
        assert back.flux == pytest.approx(m.flux)
        assert back.first_vertex == m.first_vertex
        assert back.last_vertex == m.last_vertex
        assert np.max(np.abs(gauge.dense_matrix(back) - gauge.dense_matrix(m))) < 1e-15

    def test_header_required(self):
        with pytest.raises(InvalidParameterError):
            gauge.parse_ccam("e 0 1 0.5\n")
