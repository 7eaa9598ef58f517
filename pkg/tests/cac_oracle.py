"""Independent brute-force reference for the admission gate."""


def brute_force_admission(times, rsl, esio, threshold, T, floor, eps=1e-9):
    """Earliest sample that ends an at/above-threshold run lasting >= T with Es/I0 >= floor."""
    for j in range(len(times)):
        if rsl[j] < threshold:
            continue
        i = j
        while i > 0 and rsl[i - 1] >= threshold:
            i -= 1
        if times[j] - times[i] >= T - eps and esio[j] >= floor:
            return j
    return None
