"""Straight-line reference models, written without any snnsim abstractions."""


def lif_oracle(mode, v_th, r_ref, weights, train, tau_m=1.0, c_m=1.0, dt=1.0,
               i_bias=0.0, lam=0, clamp=True, v0=0, r0=0):
    """Return (ys, vs, rs) after each cycle for one neuron starting at (v0, r0)."""
    v, r = (float(v0) if mode == "euler" else v0), r0
    ys, vs, rs = [], [], []
    for s in train:
        total = 0
        for w, bit in zip(weights, s):
            total += w * bit
        if mode == "euler":
            vt = (1 - dt / tau_m) * v + (dt / c_m) * (total + i_bias)
        else:
            vt = v + total - (lam if v != 0 else 0)
            if clamp and vt < 0:
                vt = 0
        y = 1 if (vt >= v_th and r == 0) else 0
        v = 0 if (y == 1 or r > 0) else vt
        r = r_ref if y == 1 else max(0, r - 1)
        ys.append(y)
        vs.append(v)
        rs.append(r)
    return ys, vs, rs


def route_oracle(conn, outputs):
    n = len(outputs)
    result = [[0] * n for _ in range(n)]
    for src in range(n):
        for dst in range(n):
            if conn[src][dst] == 1 and outputs[src] == 1:
                result[dst][src] = 1
    return result


def network_oracle(thresholds, weights, conn, r_ref, lam, schedule):
    """Per-cycle (v, r, y) visible during each cycle of a fixed-leak processor.

    Three register stages: impulse sampling, per-neuron input latch, neuron state.
    """
    n = len(thresholds)
    v, r, y = [0] * n, [0] * n, [0] * n
    sampled = [0] * n
    latched = [[0] * (n + 1) for _ in range(n)]
    rows = []
    for e in schedule:
        rows.append((list(v), list(r), list(y)))
        nv, nr, ny = [0] * n, [0] * n, [0] * n
        for i in range(n):
            total = weights[i] * sum(latched[i])
            vt = v[i] + total - (lam if v[i] != 0 else 0)
            if vt < 0:
                vt = 0
            fire = 1 if (vt >= thresholds[i] and r[i] == 0) else 0
            ny[i] = fire
            nv[i] = 0 if (fire or r[i] > 0) else vt
            nr[i] = r_ref if fire else max(0, r[i] - 1)
        new_latched = []
        for dst in range(n):
            row = [y[src] if conn[src][dst] else 0 for src in range(n)]
            row.append(sampled[dst])
            new_latched.append(row)
        v, r, y = nv, nr, ny
        latched = new_latched
        sampled = list(e)
    return rows
