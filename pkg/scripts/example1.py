"""Decode the N=4 worked example with SC and SC-Fano and print the search trace."""

import json

from scfano.cli import EXAMPLE1_DELTA, EXAMPLE1_SIGMA2, EXAMPLE1_Y, run_example1


def main():
    res = run_example1()
    print(f"y = {EXAMPLE1_Y}, sigma2 = {EXAMPLE1_SIGMA2}, delta = {EXAMPLE1_DELTA}")
    print(f"information set {res['info_set']}, transmitted codeword {res['codeword']}")
    print(f"SC      -> {res['sc']}")
    print(f"SC-Fano -> {res['sc_fano']} after {res['sc_fano_visits']} visits")
    for ev in res["trace"]:
        print("  " + json.dumps(ev))


if __name__ == "__main__":
    main()
