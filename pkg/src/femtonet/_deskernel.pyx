# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled discrete-event kernel for birth-death loss chains.

Keep in lockstep with _despy.run_loss_chain: identical splitmix64 stream and
arithmetic order, so results are bit-identical across backends.
"""

from libc.math cimport log
from libc.stdlib cimport free, malloc

ctypedef unsigned long long u64

cdef inline u64 _mix(u64 z) nogil:
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EB
    return z ^ (z >> 31)


def run_loss_chain(
    seed,
    target_arrivals,
    stream_rates,
    stream_limits,
    srv_rates,
    int start_state=0,
    int min_state=0,
):
    """See _despy.run_loss_chain; same contract, same random stream."""
    cdef int n_streams = len(stream_rates)
    if len(stream_limits) != n_streams:
        raise ValueError("stream rate/limit length mismatch")
    cdef int n_states = len(srv_rates)
    cdef long long target = target_arrivals
    time_in_state = [0.0] * n_states
    seen_out = [0] * n_streams
    rejected_out = [0] * n_streams

    cdef double lam_total = 0.0
    cdef int k
    for k in range(n_streams):
        lam_total += float(stream_rates[k])
    if lam_total <= 0.0 or target <= 0:
        return seen_out, rejected_out, time_in_state, 0.0, start_state, seed & 0xFFFFFFFFFFFFFFFF

    cdef double* rates = <double*> malloc(n_streams * sizeof(double))
    cdef int* limits = <int*> malloc(n_streams * sizeof(int))
    cdef long long* seen = <long long*> malloc(n_streams * sizeof(long long))
    cdef long long* rejected = <long long*> malloc(n_streams * sizeof(long long))
    cdef double* srv = <double*> malloc(n_states * sizeof(double))
    cdef double* tis = <double*> malloc(n_states * sizeof(double))
    if rates == NULL or limits == NULL or seen == NULL or rejected == NULL \
            or srv == NULL or tis == NULL:
        free(rates); free(limits); free(seen); free(rejected); free(srv); free(tis)
        raise MemoryError()
    for k in range(n_streams):
        rates[k] = float(stream_rates[k])
        limits[k] = int(stream_limits[k])
        seen[k] = 0
        rejected[k] = 0
    for k in range(n_states):
        srv[k] = float(srv_rates[k])
        tis[k] = 0.0

    cdef u64 state = <u64>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef u64 z
    cdef double rate, u, dt, pick, acc
    cdef double elapsed = 0.0
    cdef long long arrivals = 0
    cdef int i = start_state

    with nogil:
        while arrivals < target:
            rate = lam_total + srv[i]
            state = state + <u64>0x9E3779B97F4A7C15
            z = _mix(state)
            u = <double>(z >> 11) / 9007199254740992.0
            dt = -log(1.0 - u) / rate
            tis[i] += dt
            elapsed += dt

            state = state + <u64>0x9E3779B97F4A7C15
            z = _mix(state)
            pick = (<double>(z >> 11) / 9007199254740992.0) * rate
            if pick < lam_total:
                arrivals += 1
                acc = 0.0
                for k in range(n_streams):
                    acc += rates[k]
                    if pick < acc:
                        seen[k] += 1
                        if i < limits[k]:
                            i += 1
                        else:
                            rejected[k] += 1
                        break
            else:
                if i > min_state:
                    i -= 1

    for k in range(n_streams):
        seen_out[k] = seen[k]
        rejected_out[k] = rejected[k]
    for k in range(n_states):
        time_in_state[k] = tis[k]
    free(rates); free(limits); free(seen); free(rejected); free(srv); free(tis)
    return seen_out, rejected_out, time_in_state, elapsed, i, int(state)
