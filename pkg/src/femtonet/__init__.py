"""femtonet: two-tier femtocell/macrocell network simulator.

Modules: topology (geometry), spectrum (frequency planning), radio
(propagation/SIR/outage), neighborlist (handover candidates), admission
(CAC policies), queueing (Markov traffic models), des (event simulator),
videoalloc (scalable-video bandwidth), handoverflow (call-flow state
machines), scenario/experiments/cli (the experiment harness).
"""

__version__ = "0.1.0"
