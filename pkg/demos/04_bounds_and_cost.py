"""
Chernoff signature bound and attack cost
========================================
"""

from shmww import PARA1, PARA2, attack_cost_estimate, min_signatures
from shmww.distinguisher import chernoff_epsilons, column_probabilities, epsilon_identity, epsilon_random
from shmww.isd import isd_success_probability_exact

for ps, delta in ((PARA1, 0.3005), (PARA2, 0.3015)):
    rho = column_probabilities(ps)[1]
    n_star = min_signatures(0.9, delta, ps)
    est = attack_cost_estimate(ps, 0.9, delta)
    print(ps.name)
    print("  rho_I", round(rho, 6), " N*", n_star)
    print("  exact vs Chernoff at N*:",
          epsilon_random(n_star, delta), "<=", chernoff_epsilons(n_star, delta, rho)[0])
    print("                          ",
          epsilon_identity(n_star, delta, rho), "<=", chernoff_epsilons(n_star, delta, rho)[1])
    print("  p =", isd_success_probability_exact(ps), "~", round(est.p, 6))
    print("  iterations per row", round(est.expected_iterations, 2))
    print("  log2 cost", round(est.log2_total_cost, 3), " with counting", round(est.log2_attack_bound, 3))
