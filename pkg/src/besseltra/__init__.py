"""Tridiagonal-representation scattering solutions in discrete-index Bessel bases."""
