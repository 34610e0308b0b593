"""Factorial brute force over every vertex permutation, vectorised with numpy."""
import functools
import itertools

import numpy as np


@functools.lru_cache(maxsize=None)
def all_perms(n):
    return np.array(list(itertools.permutations(range(n))), dtype=np.int8).reshape(-1, n)


def adjacency_matrix(adj):
    n = len(adj)
    return np.array([[adj[v] >> w & 1 for w in range(n)] for v in range(n)], dtype=bool)


def automorphism_mask(adj):
    """Boolean mask over ``all_perms(n)`` selecting the graph automorphisms."""
    n = len(adj)
    A = adjacency_matrix(adj)
    P = all_perms(n)
    # p is an automorphism iff A[p[v], p[w]] == A[v, w] for all v, w
    return (A[P[:, :, None], P[:, None, :]] == A).all(axis=(1, 2))


def automorphism_count(adj):
    return int(automorphism_mask(adj).sum())
