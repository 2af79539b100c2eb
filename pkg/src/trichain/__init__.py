"""Triangle-switch Markov chains on labeled cubic graphs."""
