target = {"family": "w"}
n_sites = 3
