# Generated by scripts/gen_erf_table.py; do not edit by hand.
# Chebyshev coefficients, one tuple per unit interval of |x| on [0, 6).
# Piece 0 approximates erf(a)/a in u = a**2; pieces 1..5 approximate erf(a).
ERF_PIECES = (
    (
        0.9754769393826541,
        -0.14226120510371365,
        0.010035582187599796,
        -0.0005768764699767485,
        2.741993125219606e-05,
        -1.1043175507344507e-06,
        3.8488755420345036e-08,
        -1.1808582533875466e-09,
        3.2334215826050907e-11,
        -7.991015947004549e-13,
        1.7990725113961456e-14,
        -3.718635487818693e-16,
        7.103599003714253e-18,
        -1.2612455119155226e-19,
    ),
    (
        0.9428522557363892,
        0.07216411186037618,
        -0.023555662412541055,
        0.004179719271557277,
        -0.00029384471334866445,
        -3.2638635138919656e-05,
        8.853742394382987e-06,
        -4.681008471396916e-07,
        -7.330109350955952e-08,
        1.1752407126307547e-08,
        -7.524775090451023e-11,
        -1.142828196341959e-10,
        7.874600614316337e-12,
        5.467629123001088e-13,
        -9.403762598455633e-14,
        5.03122135760177e-16,
        6.599040334178441e-16,
        -3.2680304320585616e-17,
        -2.9358191593944968e-18,
        3.18920832627604e-19,
    ),
    (
        0.9986968793331212,
        0.0019935206572262573,
        -0.0009701840770401454,
        0.0003219110647036877,
        -7.532105760261905e-05,
        1.2343188523307583e-05,
        -1.2964140790298631e-06,
        4.919952190460103e-08,
        9.347897479551307e-09,
        -1.872214925621896e-09,
        1.3032760930755192e-10,
        4.143059929104777e-12,
        -1.6500888241981342e-12,
        1.2219969786197215e-13,
        2.583313546865469e-15,
        -1.1536063370860891e-15,
        7.142055458391865e-17,
        2.65095384126284e-18,
        -6.485494258354371e-19,
        2.631914484729462e-20,
    ),
    (
        0.9999948902231347,
        8.532197326791333e-06,
        -5.108210075437179e-06,
        2.282710629046247e-06,
        -7.871206543599216e-07,
        2.1434786976693522e-07,
        -4.671114629767007e-08,
        8.165367422968645e-09,
        -1.130292729798288e-09,
        1.1859203571948727e-10,
        -8.156839198519092e-12,
        9.436958251669644e-14,
        6.205377176195496e-14,
        -9.087770583472119e-15,
        6.233400614291233e-16,
        -2.881124372819006e-18,
        -4.177129120807281e-18,
        4.477786967310083e-19,
        -1.6340641398968498e-20,
    ),
    (
        0.9999999968968397,
        5.425880295210644e-09,
        -3.6665887957624334e-09,
        1.9576794331996475e-09,
        -8.44942707763187e-10,
        3.0070122824813187e-10,
        -8.965633384168758e-11,
        2.2668130864064374e-11,
        -4.901533138552403e-12,
        9.109429096003713e-13,
        -1.456718849868296e-13,
        1.9966897966202178e-14,
        -2.318798666194737e-15,
        2.2216971246364744e-16,
        -1.6453121265518943e-17,
        7.499312115724578e-19,
        1.354060270328363e-20,
    ),
    (
        0.9999999999997229,
        4.982293342038618e-13,
        -3.6368947573372964e-13,
        2.183163456820755e-13,
        -1.0939887392901223e-13,
        4.6440786423613345e-14,
        -1.6922815522375102e-14,
        5.3535076599248974e-15,
        -1.4841921457728192e-15,
        3.6338645128878294e-16,
        -7.905498752818992e-17,
        1.5352877622534614e-17,
        -2.670244043955294e-18,
        4.1665340361884525e-19,
        -5.833167810964743e-20,
    ),
)
