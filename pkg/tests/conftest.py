"""Shared test fixtures and model builders."""

from rmtlaw import FiniteMarkovChain


def three_state_chain() -> FiniteMarkovChain:
    # symmetric doubly stochastic transition, uniform stationary, zero mean
    return FiniteMarkovChain(
        states=(-1.0, 0.0, 1.0),
        transition=((0.6, 0.3, 0.1), (0.3, 0.4, 0.3), (0.1, 0.3, 0.6)),
        stationary=(1 / 3, 1 / 3, 1 / 3),
    )
