"""Independent arithmetic oracles for the frozen values in the unit tests.

Run with plain python3; nothing here imports the C++ library.
"""
from fractions import Fraction
from itertools import permutations
from math import log, lgamma, exp

# e_step on directed {0->1, 0->2, 1->2}, K=2
pi = [0.5, 0.5]
theta = [[0.2, 0.4, 0.4], [0.1, 0.1, 0.8]]
links = [(0, 1), (0, 2), (1, 2)]
N, K = 3, 2
q = []
for i in range(N):
    w = []
    for k in range(K):
        p = pi[k]
        for (s, t) in links:
            if s == i:
                p *= theta[k][t]
        w.append(p)
    z = sum(w)
    q.append([x / z for x in w])
print("e_step q:", [[repr(x) for x in row] for row in q])

# m_step from that q
pi2 = [sum(q[i][k] for i in range(N)) / N for k in range(K)]
th2 = []
for k in range(K):
    num = [sum(q[s][k] for (s, t) in links if t == j) for j in range(N)]
    tot = sum(num)
    th2.append([x / tot for x in num])
print("m_step pi:", [repr(x) for x in pi2])
print("m_step theta:", [[repr(x) for x in row] for row in th2])

# expected log-likelihood of the 3-node graph under hard q = [[1,0],[0,1],[0,1]]
hq = [[1, 0], [0, 1], [0, 1]]
L = 0.0
for i in range(N):
    for k in range(K):
        if hq[i][k] == 0:
            continue
        term = log(pi[k])
        for (s, t) in links:
            if s == i:
                term += log(theta[k][t])
        L += hq[i][k] * term
print("expected ll hard q:", repr(L))


# CRP sequential product for alpha=1, z=[0,0,1], over every ordering
def crp_seq(z, alpha, order):
    counts = {}
    p = Fraction(1)
    for idx, i in enumerate(order):
        g = z[i]
        if g in counts:
            p *= Fraction(counts[g]) / (idx + alpha)
        else:
            p *= Fraction(alpha) / (idx + alpha)
        counts[g] = counts.get(g, 0) + 1
    return p


vals = {crp_seq([0, 0, 1], 1, o) for o in permutations(range(3))}
print("crp [0,0,1] alpha=1:", vals)

# NMI for gold [0,0,1,1], pred [0,1,1,1]
gold = [0, 0, 1, 1]
pred = [0, 1, 1, 1]
n = len(gold)


def H(p):
    c = {}
    for x in p:
        c[x] = c.get(x, 0) + 1
    return -sum(v / n * log(v / n) for v in c.values())


joint = {}
for a, b in zip(gold, pred):
    joint[(a, b)] = joint.get((a, b), 0) + 1
pa = {a: gold.count(a) / n for a in set(gold)}
pb = {b: pred.count(b) / n for b in set(pred)}
mi = sum(v / n * log((v / n) / (pa[a] * pb[b])) for (a, b), v in joint.items())
print("nmi mi:", repr(mi), "hg:", repr(H(gold)), "hp:", repr(H(pred)),
      "nmi:", repr(2 * mi / (H(gold) + H(pred))))


# Collapsed Gibbs weight for N=2 graph {0->1}, node 0 resampled, node 1 in group 0.
def log_marg(links, N, z, alpha, beta):
    groups = sorted(set(z))
    lp = 0.0
    # CRP
    sizes = [z.count(g) for g in groups]
    lp += len(groups) * log(alpha) + sum(lgamma(s) for s in sizes)
    lp -= sum(log(i + alpha) for i in range(len(z)))
    for g in groups:
        cnt = [0] * N
        for (s, t) in links:
            if z[s] == g:
                cnt[t] += 1
        m = sum(cnt)
        lp += lgamma(N * beta) - lgamma(N * beta + m)
        lp += sum(lgamma(beta + c) - lgamma(beta) for c in cnt)
    return lp


a = log_marg([(0, 1)], 2, [0, 0], 1.0, 1.0)
b = log_marg([(0, 1)], 2, [1, 0], 1.0, 1.0)
wa, wb = exp(a), exp(b)
print("gibbs N=2 normalized:", wa / (wa + wb), wb / (wa + wb))
