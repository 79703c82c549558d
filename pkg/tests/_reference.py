"""Reference data transcribed for the dataset and case-study checks."""

# substation id -> buses of the 118-bus grid
_SUBSTATIONS = """
1:1 2:2 3:3 4:4 5:5,8 6:6 7:7 8:9 9:10 10:11 11:12 12:13 13:14 14:15 15:16 16:17,30 17:18
18:19 19:20 20:21 21:22 22:23 23:24 24:25,26 25:27 26:28 27:29 28:31 29:32 30:33 31:34 32:35
33:36 34:37,38 35:39 36:40 37:41 38:42 39:43 40:44 41:45 42:46 43:47 44:48 45:49 46:50 47:51
48:52 49:53 50:54 51:55 52:56 53:57 54:58 55:59,63 56:60 57:61,64 58:62 59:65,66 60:67
61:68,69,116 62:70 63:71 64:72 65:73 66:74 67:75 68:76 69:77 70:78 71:79 72:80,81 73:82
74:83 75:84 76:85 77:86,87 78:88 79:89 80:90 81:91 82:92 83:93 84:94 85:95 86:96 87:97 88:98
89:99 90:100 91:101 92:102 93:103 94:104 95:105 96:106 97:107 98:108 99:109 100:110 101:111
102:112 103:113 104:114 105:115 106:117 107:118
"""

SUBSTATIONS_118 = {
    int(sid): tuple(int(b) for b in buses.split(","))
    for sid, buses in (item.split(":") for item in _SUBSTATIONS.split())
}

# operator truth table: in1, in2, min-AND, max-OR, new-XOR
TRUTH_TABLE = [
    (2, 2, 2, 2, 2), (2, 1, 1, 2, 1), (2, 0, 0, 2, 1),
    (1, 2, 1, 2, 1), (1, 1, 1, 1, 1), (1, 0, 0, 1, 1),
    (0, 2, 0, 2, 1), (0, 1, 0, 1, 1), (0, 0, 0, 0, 0),
]

HURRICANE_SUBSTATIONS = (85, 86, 88, 89, 90, 93, 94, 99, 100, 101, 102)
HURRICANE_BUSES = {95, 96, 98, 99, 100, 103, 104, 109, 110, 111, 112}

# impact factors measured on another communication layer for this grid;
# the bundled layer is synthetic, so these are informational only
REFERENCE_IMPACT = {"P100": 11, "P110": 7, "P68": 301, "C1_1_61_61": 299, "C2_1_46_0": 4}
