"""Static unary unbiased (1+1) EAs: simulation, drift calculus and exact oracles."""
