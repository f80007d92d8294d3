"""Built-in scenario defaults: a REMUS-class torpedo AUV.

Mass and hull geometry follow the usual 1.6 m x 0.19 m survey-torpedo
numbers; added mass is derived from the hull as a prolate spheroid; four
tail fins sit in a + layout (theta = 0, pi/2, pi, 3*pi/2); thruster and
damping coefficients are set so the vehicle cruises near 1.5 m/s.  Every
value can be overridden from the scenario file.
"""

import math

DEFAULT_SCENARIO = {
    "dt": 0.01,
    "seed": 42,
    "control_rate": 10.0,
    "environment": {
        "rho": 1025.0,
        "gravity": 9.81,
        "current": [0.0, 0.0, 0.0],
    },
    "vehicle": {
        "mass": 31.0,
        "length": 1.6,
        "diameter": 0.19,
        "inertia": [0.16, 4.0, 4.0],
        "added_mass": "auto",
        "linear_damping": [2.0, 15.0, 15.0, 0.8, 3.0, 3.0],
        "quadratic_damping": [3.0, 80.0, 80.0, 0.3, 15.0, 15.0],
        "weight": None,
        "buoyancy": None,
        "cb_offset": [0.0, 0.0, -0.02],
        "fins": [
            {
                "x_off": -0.6,
                "r": 0.095,
                "theta": i * math.pi / 2.0,
                "area": 0.0064,
                "lift_coeff": 3.0,
                "delta_max": 0.3,
                "time_constant": 0.1,
            }
            for i in range(4)
        ],
        "thruster": {
            "k_thrust": 0.025,
            "time_constant": 0.3,
            "n_max": 26.0,
            "k_roll_reaction": 0.0,
        },
    },
    "autopilot": {
        "depth_kp": 0.35,
        "depth_ki": 0.02,
        "depth_kd": 0.3,
        "theta_max": 0.3,
        "depth_int_limit": 0.15,
        "pitch_kp": 3.0,
        "pitch_kd": 1.0,
        "heading_lambda": 0.5,
        "heading_k_s": 0.3,
        "heading_phi_b": 0.1,
        "heading_k_r": 0.4,
        "speed_kp": 12.0,
        "speed_ki": 4.0,
    },
    "sensors": {
        "depth": {"rate": 10.0, "sigma": 0.01, "dropout": 0.0, "seed": 1},
        "imu": {
            "rate": 50.0,
            "sigma": {"attitude": 0.002, "rate": 0.005},
            "dropout": 0.0,
            "seed": 2,
        },
        "mag": {"rate": 10.0, "sigma": 0.01, "dropout": 0.0, "seed": 3},
        "dvl": {
            "rate": 5.0,
            "sigma": {"altitude": 0.05, "velocity": 0.01},
            "dropout": 0.0,
            "seed": 4,
        },
    },
    "terrain": {"kind": "flat", "depth": 30.0},
    "initial": {
        "position": [0.0, 0.0, 0.0],
        "euler": [0.0, 0.0, 0.0],
        "nu": [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        "shaft_speed": 0.0,
    },
}
