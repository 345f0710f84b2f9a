"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import saddleglt as sg


def test_mesh_and_assembly():
    mesh = sg.UniformMesh(4)
    assert mesh.n == 4
    assert mesh.h == pytest.approx(0.2)
    assert mesh.num_dofs == 16

    M = sg.assemble_mass(mesh)
    K = sg.assemble_stiffness(mesh)
    assert M.shape == (16, 16)
    assert M.is_symmetric()
    assert K.coeff(0, 0) == pytest.approx(4.0)
    assert M.coeff(0, 0) == pytest.approx(mesh.h**2 / 2)

    indptr, indices, data, shape = K.to_arrays()
    assert shape == (16, 16)
    assert len(data) == len(indices) == indptr[-1]


def test_load_and_interpolate():
    mesh = sg.UniformMesh(3)
    ones = sg.assemble_load(mesh, lambda x, y: 1.0)
    assert np.allclose(ones, mesh.h**2)
    vals = sg.interpolate(mesh, lambda x, y: x)
    assert vals[0] == pytest.approx(0.25)


def test_symbols_and_toeplitz():
    m, kappa, f = sg.predefined_symbols(1e-4)
    assert f.s == 3
    f0 = sg.symbol_eval(f, [0.0, 0.0])
    assert f0[0, 0] == 0.0
    assert f0[1, 1] == pytest.approx(1e-4)
    assert f0[1, 2] == pytest.approx(-1.0)

    K = sg.toeplitz_build(kappa, [2, 2])
    assert K.coeff(0, 0) == 4.0
    assert K.coeff(0, 1) == -1.0

    back = sg.MatrixSymbol.from_json(f.to_json())
    assert back.s == 3


def test_bounds_and_counts():
    bounds = sg.interval_bounds(1e-4, 60)
    (m1, M1), (m2, M2), (m3, M3) = bounds
    assert m2 == pytest.approx(0.0, abs=1e-15)
    assert M1 < m2 < M2 < m3 < M3

    sys = sg.build_test_system(6, 1e-4, sg.ConstraintKind.poisson)
    bn = sg.permute_to_block_toeplitz(sys)
    spectrum = sg.full_spectrum(bn)
    count = sg.count_eigs_in_interval(bn, m2, M2)
    brute = sum(1 for v in spectrum if m2 < v <= M2)
    assert count == brute


def test_system_and_solver():
    sys = sg.build_system(
        5, 1e-3, sg.ConstraintKind.poisson,
        lambda x, y: math.sin(math.pi * x) * math.sin(math.pi * y),
        lambda x, y: 1.0,
    )
    assert sys.size == 75
    assert sys.A.is_symmetric()

    prec = sg.make_preconditioner(sys, sg.PrecVariant.pn)
    res = sg.gmres(sys.A, sys.b, prec, tol=1e-8, maxit=50)
    assert res["converged"]
    assert res["iterations"] <= 10
    x = np.asarray(res["x"])
    r = np.asarray(sys.b) - np.asarray(sys.A.matvec(x))
    assert np.linalg.norm(r) <= 1e-8 * np.linalg.norm(sys.b)

    xbar = sg.unscale_solution(sys, list(x))
    assert len(xbar) == 75


def test_run_solve_case():
    row = sg.run_solve_case("poisson", 7, 1e-3, prec="pn", solver="gmres")
    assert row["converged"]
    assert row["N"] == 147
    assert 1 <= row["iterations"] <= 5
