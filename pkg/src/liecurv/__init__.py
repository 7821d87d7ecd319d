"""Curvature operators on symmetric 2-tensors of semisimple Lie algebras with the Killing metric.

Modules: ``rootsystems`` and ``chevalley`` build split algebras, ``realforms``
builds real forms, realifications, sums and basis changes, ``liecore`` holds
Killing forms and Cartan 3-forms, ``curvops`` the operators Omega, T, Lambda
and Pi, ``spectra`` the spectrum tables and kernels, ``reconstruct`` the
recovery of an algebra from its bare 3-form, and ``cli`` the command line.
"""

__version__ = "0.1.0"
