import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import params_box, q_box, rel
from qsw import chains, gsw, modified
from qsw.chains import ChainSequence, ParameterSequence
from qsw.qseries import QParams


class TestDiagonalConstants:
    def test_constant_chain(self, diagonal):
        beta = chains.gsw_chain(diagonal, 20).beta
        assert np.allclose(beta, 2 / 9, rtol=0, atol=1e-13)
        assert beta[0] == pytest.approx(0.222222, abs=1e-6)

    def test_constant_parameters(self, diagonal):
        mn, mx, bt = chains.parameter_sequences(diagonal, 20)
        assert mn.h[0] == 0.0
        assert np.allclose(mx.h, 2 / 3, rtol=0, atol=1e-13)
        assert mx.h[3] == pytest.approx(0.666667, abs=1e-6)
        assert np.allclose(bt.h, 1 / 3, rtol=0, atol=1e-14)

    def test_first_shell_coefficient(self, diagonal):
        _, mx, _ = chains.parameter_sequences(diagonal, 3)
        shell = chains.shell_recurrence(gsw.kernel_recurrence(diagonal, 3), mx, 2)
        assert shell.c_n(1) == pytest.approx(0.5 * 0.5 ** -2.5, rel=1e-14)
        assert shell.c_n(1) == pytest.approx(2.828427, abs=1e-6)
        assert shell.c_n(1) == pytest.approx(modified.modified_recurrence(diagonal, 1).c_n(1), rel=1e-14)

    def test_series(self, diagonal):
        L, G = chains.lg_series(diagonal, 300)
        assert G == pytest.approx(2.0, rel=1e-13)
        assert L == pytest.approx(1.5, abs=1e-9)
        h0 = 1 / 3
        assert h0 + (1 - h0) / G == pytest.approx(2 / 3, rel=1e-13)

    def test_continued_fraction(self, diagonal):
        beta = chains.gsw_chain(diagonal, 400)
        assert chains.continued_fraction(beta, 200) == pytest.approx(2 / 3, abs=1e-8)
        assert chains.cf_closed_form(diagonal, 0) == pytest.approx(2 / 3, rel=1e-14)


class TestContinuedFraction:
    def test_zero_chain(self):
        assert chains.continued_fraction(ChainSequence(np.zeros(5)), 5) == 1.0

    @pytest.mark.parametrize("depth", [1, 2, 10, 500, 10_000])
    def test_constant_quarter_exact_truncation(self, depth):
        # with tail value 1 the depth-d truncation of 1 - (1/4)/(1 - ...) is (d+2)/(2(d+1))
        beta = ChainSequence(np.full(depth, 0.25))
        assert chains.continued_fraction(beta, depth) == pytest.approx((depth + 2) / (2 * (depth + 1)), rel=1e-12)

    @pytest.mark.xfail(strict=True, reason="truncation error at the 1/4 boundary is 1/(2(d+1)), about 5e-5 at depth 1e4")
    def test_constant_quarter_boundary_rate(self):
        beta = ChainSequence(np.full(10_000, 0.25))
        assert abs(chains.continued_fraction(beta, 10_000) - 0.5) < 1e-6

    @pytest.mark.parametrize("pq", [(0.3, 0.4), (0.5, 0.5), (0.0, 0.5)])
    def test_tails_match_closed_form(self, pq):
        P = QParams(*pq)
        beta = chains.gsw_chain(P, 400)
        for k in range(3):
            assert abs(chains.continued_fraction(beta.tail(k), 300) - chains.cf_closed_form(P, k)) < 1e-8

    def test_errors(self):
        beta = ChainSequence([0.1, 0.5, 0.5])
        with pytest.raises(ValueError):
            chains.continued_fraction(beta, 0)
        with pytest.raises(ValueError):
            chains.continued_fraction(beta, 4)
        with pytest.raises(ZeroDivisionError):
            chains.continued_fraction(beta, 3)


class TestDivergenceWitness:
    def test_terms_agree_termwise(self):
        direct, reduced = chains.divergence_terms(QParams(0.3, 0.4), 12)
        assert rel(direct, reduced) < 1e-10

    def test_asymptotic_term(self):
        P = QParams(0.3, 0.4)
        direct, _ = chains.divergence_terms(P, 15)
        assert direct[-1] / chains.divergence_term_asymptote(P, 15) == pytest.approx(1.0, abs=0.1)

    def test_partial_sums_grow(self, grid_params):
        sums = chains.maximal_divergence_witness(grid_params, 25)
        assert np.all(np.diff(sums) > 0)
        assert sums[-1] > 1e6


class TestValidation:
    def test_chain_entries_in_unit_interval(self):
        with pytest.raises(ValueError):
            ChainSequence([0.2, 1.0])
        with pytest.raises(ValueError):
            ChainSequence([-0.1])

    def test_parameter_kinds(self):
        with pytest.raises(ValueError):
            ParameterSequence([0.0, 0.5], "weird")
        with pytest.raises(ValueError):
            ParameterSequence([0.2, 1.0], "custom")

    def test_minimal_sequence_has_no_shell(self, classical):
        mn, _, _ = chains.parameter_sequences(classical, 5)
        with pytest.raises(ValueError, match="h_0"):
            chains.shell_recurrence(gsw.kernel_recurrence(classical, 5), mn, 4)


# ----------------------------------------------------------- properties


@given(P=params_box)
def test_chain_parameter_identity(P):
    beta = chains.gsw_chain(P, 50).beta
    for seq in chains.parameter_sequences(P, 51):
        assert rel(seq.chain(), beta) < 1e-12


@given(P=params_box)
def test_chain_from_kernel(P):
    assert rel(chains.chain_from_kernel(gsw.kernel_recurrence(P, 51)).beta, chains.gsw_chain(P, 50).beta) < 1e-12


@given(P=params_box)
def test_minimal_below_maximal(P):
    mn, mx, bt = chains.parameter_sequences(P, 51)
    assert mn.h[0] == 0.0
    assert np.all(mn.h < mx.h)
    assert np.all(mn.h <= bt.h) and np.all(bt.h <= mx.h)


@given(P=params_box, depth=st.integers(1, 60))
def test_truncations_decrease_toward_closed_form(P, depth):
    beta = chains.gsw_chain(P, depth + 1)
    a = chains.continued_fraction(beta, depth)
    b = chains.continued_fraction(beta, depth + 1)
    assert b <= a + 1e-15
    assert b >= chains.cf_closed_form(P, 0) - 1e-14


@given(P=params_box, depth=st.integers(1, 80))
def test_forward_and_backward_evaluation_agree(P, depth):
    beta = chains.gsw_chain(P, depth)
    assert chains.continued_fraction_forward(beta, depth) == pytest.approx(chains.continued_fraction(beta, depth), rel=1e-12)


@given(P=params_box)
def test_cf_depth_200(P):
    beta = chains.gsw_chain(P, 200)
    assert abs(chains.continued_fraction(beta, 200) - chains.cf_closed_form(P, 0)) < 1e-7


@given(P=params_box)
def test_series_reconstruct_closed_form(P):
    L, G = chains.lg_series(P, 300)
    L2, G2 = chains.lg_series_closed(P, 300)
    M0 = chains.cf_closed_form(P, 0)
    h0 = chains.parameter_sequences(P, 1)[2].h[0]
    assert rel([L, G], [L2, G2]) < 1e-12
    assert rel(1 / L, M0) < 1e-9
    assert rel(h0 + (1 - h0) / G, M0) < 1e-9
    assert rel(chains.cf_closed_form_alt(P), M0) < 1e-12


@given(P=params_box)
def test_shell_round_trips(P):
    kern = gsw.kernel_recurrence(P, 12)
    _, mx, bt = chains.parameter_sequences(P, 12)
    s1 = chains.shell_recurrence(kern, bt, 11)
    s2 = chains.shell_recurrence(kern, mx, 11)
    g = gsw.gsw_recurrence(P, 11)
    m = modified.modified_recurrence(P, 11)
    assert rel(s1.c, g.c) < 1e-10 and rel(s1.lam, g.lam[:10]) < 1e-10
    assert rel(s2.c, m.c) < 1e-10 and rel(s2.lam, m.lam[:10]) < 1e-10


@given(q=q_box)
def test_diagonal_maximal_shell(q):
    P = QParams(q, q)
    _, mx, _ = chains.parameter_sequences(P, 12)
    shell = chains.shell_recurrence(gsw.kernel_recurrence(P, 12), mx, 11)
    ref = modified.modified_recurrence_p_eq_q(q, 11)
    assert rel(shell.c, ref.c) < 1e-10 and rel(shell.lam, ref.lam[:10]) < 1e-10


@given(P=params_box)
def test_mu_h_relation(P):
    kern = gsw.kernel_recurrence(P, 12)
    _, mx, bt = chains.parameter_sequences(P, 12)
    mh = chains.shell_recurrence(kern, bt, 10).moments(9)
    mM = chains.shell_recurrence(kern, mx, 10).moments(9)
    factor = mx.h[0] / bt.h[0]
    # mu^h = mu^M + (M_0/h_0 - 1) mu^M(R) delta_0: orders >= 1 agree after matching mass
    scaled = mh * factor
    assert rel(scaled[1:], mM[1:]) < 1e-8
    assert rel(scaled[0] / mM[0], factor) < 1e-8
