import sys
sys.path.insert(0, "src")
exec(open("scripts/probe_arch2g.py").read().split("for (pA, pB) in")[0])

for (pA, pB) in ((0.43, 0.67), (0.43, 0.68), (0.44, 0.68), (0.44, 0.69), (0.45, 0.69)):
    try:
        trial(pA, pB)
    except Exception as e:
        print(f"pA={pA} pB={pB}: ERR {repr(e)[:70]}")
