"""A short tour of the exact normal-ordered algebra: products, brackets and the two specializations."""
from obsalg.poisson import commutator, format_element, lie_bracket, multiply, parse, run_identity_battery
from obsalg.poisson import specialize_classical, specialize_quantum

a, b = parse("q1*p1", 1), parse("q1^2 + p1", 1)
print("a*a        =", format_element(multiply(a, a)))
print("[a, b]     =", format_element(commutator(a, b)))
print("{a, b}     =", format_element(lie_bracket(a, b)))
print("classical  =", specialize_classical(lie_bracket(a, b)))
print("on x^3     =", specialize_quantum(commutator(parse("q1", 1), parse("p1", 1)), 1, [0, 0, 0, 1]))
for row in run_identity_battery(pairs=20, seed=0):
    print(row.line())
