#!/usr/bin/env python3
"""Derive closed-form ingredients for the built-in models.

Writes include/hypo/generated/<model>_terms.hpp containing
  - generator iterates  L^{k-1} mu  (all components)
  - directional terms   L_1 mu, L_1 L mu
  - covariance corrections Sigma_j of the block-scaled one-step covariance

The conditional moments are expanded with E[phi(X_h)] = sum_m h^m/m! L^m phi(x).
Potential derivatives enter as opaque symbols u1, u2, ... with d/dq u_k = u_{k+1}.

Usage: python3 scripts/derive_builtins.py [--check-only]
"""

import argparse
import pathlib
import sys
import time

import sympy as sp
from sympy.printing.cxx import CXX17CodePrinter

ROOT = pathlib.Path(__file__).resolve().parents[1]
OUT_DIR = ROOT / "include" / "hypo" / "generated"

NU = 12
u = sp.symbols(f"u1:{NU + 1}")


class Model:
    def __init__(self, name, klass, states, powers, mu, A, params, consts, chain, gen_order, kmax, maxp):
        self.name = name
        self.klass = klass
        self.states = states
        self.powers2 = powers  # twice the block Delta power per component
        self.mu = [sp.expand(e) for e in mu]
        self.A = [[sp.expand(e) for e in col] for col in A]  # list of columns
        self.params = params
        self.consts = consts
        self.chain = chain  # state symbol -> True when potential symbols hang off it
        self.gen_order = gen_order
        self.kmax = kmax
        self.maxp = maxp

    def d(self, e, v):
        out = sp.diff(e, v)
        if self.chain.get(v):
            for k in range(NU - 1):
                if e.has(u[k]):
                    out += sp.diff(e, u[k]) * u[k + 1]
        return out

    def L(self, e):
        grads = [self.d(e, v) for v in self.states]
        out = sum(m * g for m, g in zip(self.mu, grads))
        for col in self.A:
            for i, ai in enumerate(col):
                if ai == 0:
                    continue
                for j, aj in enumerate(col):
                    if aj == 0:
                        continue
                    out += sp.Rational(1, 2) * ai * aj * self.d(grads[i], self.states[j])
        return sp.expand(out)

    def Lj(self, e, j):
        return sp.expand(sum(a * self.d(e, v) for a, v in zip(self.A[j], self.states)))


def langevin():
    q, p = sp.symbols("q p")
    gamma, sigma = sp.symbols("gamma sigma")
    return Model(
        "langevin", "I", [q, p], [3, 1],
        [p, -u[0] + gamma * p],
        [[0, sigma]],
        [gamma, sigma], [], {q: True}, gen_order=3, kmax=2, maxp=4)


def qgle():
    q, p, s = sp.symbols("q p s")
    lam, alpha, sigma = sp.symbols("lambda_ alpha sigma")
    D = sp.Symbol("D")
    return Model(
        "qgle", "II", [q, p, s], [5, 3, 1],
        [p, -u[0] + lam * s, -lam * p - alpha * s],
        [[0, 0, sigma]],
        [D, lam, alpha, sigma], [], {q: True}, gen_order=3, kmax=1, maxp=3)


def fhn():
    X, Y = sp.symbols("X Y")
    eps, gamma, alpha, sigma = sp.symbols("eps gamma alpha sigma")
    s = sp.Symbol("s")
    return Model(
        "fhn", "I", [X, Y], [3, 1],
        [(X - X**3 - Y - s) / eps, gamma * X - Y + alpha],
        [[0, sigma]],
        [eps, gamma, alpha, sigma], [s], {}, gen_order=3, kmax=2, maxp=4)


def derive(m):
    t0 = time.time()
    N = len(m.states)
    gen = [list(m.mu)]
    while len(gen) < m.gen_order:
        gen.append([m.L(e) for e in gen[-1]])
    dir1 = [m.Lj(e, 0) for e in m.mu]
    dirL = [m.Lj(e, 0) for e in gen[1]]

    emax = max(m.powers2) + m.kmax  # highest Delta power needed (for the top-left entry)
    # iterates of L on coordinates and their products
    Ly = []
    for i in range(N):
        seq = [m.states[i]]
        for _ in range(emax):
            seq.append(m.L(seq[-1]))
        Ly.append(seq)
    Lyy = {}
    for i in range(N):
        for j in range(i, N):
            need = (m.powers2[i] + m.powers2[j]) // 2 + m.kmax
            seq = [m.states[i] * m.states[j]]
            for _ in range(need):
                seq.append(m.L(seq[-1]))
            Lyy[i, j] = seq

    def cov_coeff(i, j, e):
        c = Lyy[i, j][e] / sp.factorial(e)
        for a in range(e + 1):
            c -= Ly[i][a] / sp.factorial(a) * Ly[j][e - a] / sp.factorial(e - a)
        return sp.expand(c)

    scaled = []  # scaled[k][i][j]
    for k in range(m.kmax + 1):
        S = sp.zeros(N, N)
        for i in range(N):
            for j in range(i, N):
                e = (m.powers2[i] + m.powers2[j]) // 2 + k
                S[i, j] = S[j, i] = cov_coeff(i, j, e)
        scaled.append(S)
    # every lower-order coefficient must vanish
    for i in range(N):
        for j in range(i, N):
            e0 = (m.powers2[i] + m.powers2[j]) // 2
            for e in range(e0):
                assert cov_coeff(i, j, e) == 0, (m.name, i, j, e)
    print(f"{m.name}: derived in {time.time() - t0:.1f}s", file=sys.stderr)
    return gen, dir1, dirL, scaled


def check_leading(m, dir1, dirL, S0):
    N = len(m.states)
    a = m.A[0]
    if m.klass == "I":
        ns = 1
        expect = sp.zeros(N, N)
        for i in range(N):
            for j in range(N):
                if i < ns and j < ns:
                    expect[i, j] = sp.Rational(1, 3) * dir1[i] * dir1[j]
                elif i < ns:
                    expect[i, j] = sp.Rational(1, 2) * dir1[i] * a[j]
                elif j < ns:
                    expect[i, j] = sp.Rational(1, 2) * a[i] * dir1[j]
                else:
                    expect[i, j] = a[i] * a[j]
    else:
        c = {("S1", "S1"): (sp.Rational(1, 20), dirL, dirL),
             ("S1", "S2"): (sp.Rational(1, 8), dirL, dir1),
             ("S1", "R"): (sp.Rational(1, 6), dirL, a),
             ("S2", "S2"): (sp.Rational(1, 3), dir1, dir1),
             ("S2", "R"): (sp.Rational(1, 2), dir1, a),
             ("R", "R"): (1, a, a)}
        blk = ["S1", "S2", "R"]
        expect = sp.zeros(N, N)
        for i in range(N):
            for j in range(N):
                key = (blk[i], blk[j])
                if key in c:
                    f, v, w = c[key]
                    expect[i, j] = f * v[i] * w[j]
                else:
                    f, v, w = c[(blk[j], blk[i])]
                    expect[i, j] = f * v[j] * w[i]
    diff = (S0 - expect).applyfunc(sp.simplify)
    assert diff == sp.zeros(N, N), (m.name, diff)


def check_fhn_appendix(m, S1):
    X = m.states[0]
    eps, gamma, alpha, sigma = m.params
    L1 = -sigma / eps
    L2 = sigma / eps**2 * (-(1 - 3 * X**2) + eps)
    L3 = -sigma
    expect = sp.Matrix([[L1 * L2 / 4, sigma * L2 / 6 + L1 * L3 / 3],
                        [sigma * L2 / 6 + L1 * L3 / 3, sigma * L3]])
    diff = (S1 - expect).applyfunc(sp.simplify)
    print("fhn Sigma_1 vs appendix D:", diff, file=sys.stderr)
    return diff


class Printer(CXX17CodePrinter):
    def _print_Pow(self, expr):
        b, e = expr.as_base_exp()
        if e.is_Integer and 0 < e <= 9:
            s = self.parenthesize(b, 100)
            return "(" + "*".join([s] * int(e)) + ")"
        if e.is_Integer and -9 <= e < 0:
            s = self.parenthesize(b, 100)
            return "(1.0/(" + "*".join([s] * int(-e)) + "))"
        return super()._print_Pow(expr)

    def _print_Rational(self, expr):
        return f"({float(expr.p)!r}/{float(expr.q)!r})"

    def _print_Integer(self, expr):
        return f"{float(expr)!r}"

    def _print_Symbol(self, expr):
        return expr.name


def emit_block(exprs, target, indent="  "):
    P = Printer()
    repl, red = sp.cse(exprs, symbols=sp.numbered_symbols("t"), optimizations="basic")
    lines = []
    for sym, e in repl:
        lines.append(f"{indent}const auto {sym} = {P.doprint(e)};")
    for idx, e in enumerate(red):
        lines.append(f"{indent}{target(idx)} = T({P.doprint(e)});")
    return lines


def emit(m, gen, dir1, dirL, scaled):
    N = len(m.states)
    P = len(m.params)
    ns = "hypo::generated::" + m.name
    unpack = []
    for i, v in enumerate(m.states):
        unpack.append(f"  [[maybe_unused]] const double {v.name} = x[{i}];")
    for i, v in enumerate(m.params):
        unpack.append(f"  [[maybe_unused]] const T& {v.name} = th[{i}];")
    for v in m.consts:
        unpack.append(f"  [[maybe_unused]] const double {v.name} = c_{v.name};")

    def uses_u(exprs):
        top = 0
        for e in exprs:
            for k in range(NU):
                if e.has(u[k]):
                    top = max(top, k + 1)
        return top

    def upack(exprs):
        return [f"  [[maybe_unused]] const auto& u{k + 1} = du[{k}];" for k in range(uses_u(exprs))]

    extra = "".join(f", double c_{v.name}" for v in m.consts)
    sig = (f"const Eigen::Matrix<double, {N}, 1>& x, const Eigen::Matrix<T, {P}, 1>& th"
           f", [[maybe_unused]] const U* du{extra}")

    out = []
    out.append("// Generated by scripts/derive_builtins.py; do not edit.")
    out.append("#pragma once")
    out.append("")
    out.append("#include <Eigen/Core>")
    out.append("")
    out.append('#include "hypo/local_terms.hpp"')
    out.append("")
    out.append(f"namespace {ns} {{")
    out.append("")
    out.append(f"inline constexpr int kGeneratorOrder = {m.gen_order};")
    out.append(f"inline constexpr int kCorrections = {m.kmax};")
    out.append("")

    # generator iterates
    out.append("// L^{k-1} mu, all components")
    out.append("template <class T, class U>")
    out.append(f"Eigen::Matrix<T, {N}, 1> generator_term(int k, {sig}) {{")
    out += unpack
    out.append(f"  Eigen::Matrix<T, {N}, 1> r;")
    out.append("  switch (k) {")
    for k, g in enumerate(gen, start=1):
        out.append(f"    case {k}: {{")
        body = [f"    {l}" for l in upack(g)] + emit_block(g, lambda i: f"r[{i}]", indent="      ")
        out += body
        out.append("      break;")
        out.append("    }")
    out.append("    default:")
    out.append("      r.setConstant(T(0.0));")
    out.append("  }")
    out.append("  return r;")
    out.append("}")
    out.append("")

    for fname, exprs, doc in (("directional_term", dir1, "L_1 mu"),
                              ("directional_generator_term", dirL, "L_1 L mu")):
        out.append(f"// {doc}")
        out.append("template <class T, class U>")
        out.append(f"Eigen::Matrix<T, {N}, 1> {fname}({sig}) {{")
        out += unpack
        out += upack(exprs)
        out.append(f"  Eigen::Matrix<T, {N}, 1> r;")
        out += emit_block(exprs, lambda i: f"r[{i}]")
        out.append("  return r;")
        out.append("}")
        out.append("")

    out.append("// Sigma_j: coefficient of h^j in the block-scaled conditional covariance")
    out.append("template <class T, class U>")
    out.append(f"Eigen::Matrix<T, {N}, {N}> covariance_correction(int j, {sig}) {{")
    out += unpack
    out.append(f"  Eigen::Matrix<T, {N}, {N}> r;")
    out.append("  switch (j) {")
    for k in range(1, m.kmax + 1):
        S = scaled[k]
        exprs = [S[i, j] for i in range(N) for j in range(i, N)]
        idx = [(i, j) for i in range(N) for j in range(i, N)]
        out.append(f"    case {k}: {{")
        out += [f"    {l}" for l in upack(exprs)]
        out += emit_block(exprs, lambda n: f"r({idx[n][0]}, {idx[n][1]})", indent="      ")
        for i in range(N):
            for j in range(i + 1, N):
                out.append(f"      r({j}, {i}) = r({i}, {j});")
        out.append("      break;")
        out.append("    }")
    out.append("    default:")
    out.append("      r.setConstant(T(0.0));")
    out.append("  }")
    out.append("  return r;")
    out.append("}")
    out.append("")
    # fused evaluator per expansion order p: only the iterates each block needs
    shift = [(pw - 1) // 2 for pw in m.powers2]
    lead = []
    for i in range(N):
        src = {2: dirL, 1: dir1, 0: m.A[0]}[shift[i]] if m.klass == "II" else {1: dir1, 0: m.A[0]}[shift[i]]
        lead.append(src[i])
    out.append("// All local ingredients for expansion order p in one pass.")
    out.append("template <class T, class U>")
    out.append(f"void local_terms(int order, {sig}, LocalTerms<T, {N}, 1>& o) {{")
    out += unpack
    out.append("  switch (order) {")
    for p in range(2, m.maxp + 1):
        K = p // 2
        exprs, targets = [], []
        for i in range(N):
            for k in range(1, K + shift[i] + 1):
                exprs.append(gen[k - 1][i])
                targets.append(f"o.gen[{k - 1}][{i}]")
        for i in range(N):
            exprs.append(lead[i])
            targets.append(f"o.lead({i}, 0)")
        if p >= 3:
            for j in range(1, K + 1):
                for a in range(N):
                    for b in range(a, N):
                        exprs.append(scaled[j][a, b])
                        targets.append(f"o.corr[{j - 1}]({a}, {b})")
        out.append(f"    case {p}: {{")
        out += [f"    {l}" for l in upack(exprs)]
        out += emit_block(exprs, lambda n: targets[n], indent="      ")
        if p >= 3:
            for j in range(1, K + 1):
                for a in range(N):
                    for b in range(a + 1, N):
                        out.append(f"      o.corr[{j - 1}]({b}, {a}) = o.corr[{j - 1}]({a}, {b});")
        out.append("      break;")
        out.append("    }")
    out.append("    default:")
    out.append("      break;")
    out.append("  }")
    out.append("}")
    out.append("")
    out.append(f"}}  // namespace {ns}")
    out.append("")
    return "\n".join(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check-only", action="store_true")
    args = ap.parse_args()
    for make in (langevin, fhn, qgle):
        m = make()
        gen, dir1, dirL, scaled = derive(m)
        check_leading(m, dir1, dirL, scaled[0])
        if m.name == "fhn":
            assert check_fhn_appendix(m, scaled[1]) == sp.zeros(2, 2)
        if not args.check_only:
            path = OUT_DIR / f"{m.name}_terms.hpp"
            path.write_text(emit(m, gen, dir1, dirL, scaled))
            print(f"wrote {path.relative_to(ROOT)}", file=sys.stderr)


if __name__ == "__main__":
    main()
