"""Switch Markov chain workbench for bipartite degree sequences."""
