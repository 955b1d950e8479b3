"""Reference values frozen from independent solvers.

Produced once with statsmodels (PHReg with Breslow ties, Logit, OLS, Wilson
intervals), scikit-learn ElasticNet on standardized columns and a cvxpy
exponential-cone formulation of the penalized Breslow partial likelihood.
None of those packages is needed to run the tests.
"""

COX8 = {'coef': [1.584360229126776], 'se': [0.8285031188177023], 'll': -5.032089646153795}

COX14 = {'time': [4.0, 1.0, 2.0, 5.0, 8.0, 2.0, 3.0, 2.0, 1.0, 4.0, 2.0, 2.0, 3.0, 1.0],
 'status': [1, 0, 0, 1, 1, 1, 1, 1, 0, 1, 1, 0, 1, 1],
 'x': [[0.42, -0.43], [0.27, 0.06], [0.42, 0.22], [1.66, -0.66], [1.2, -0.4], [-0.96, 1.21],
       [-0.44, -0.39], [-1.39, -2.1], [0.63, -1.17], [0.78, 1.85], [-0.11, -1.13], [0.39, 0.76],
       [-0.26, 0.02], [1.34, 1.27]],
 'coef': [-1.103304793748199, 0.1815713666172061],
 'se': [0.5707564936262548, 0.3247862975713869],
 'll': -14.643186754907095,
 'll0': -16.881997989266207}

LOGIT40 = {'x': [[0.71, -0.87], [-0.05, 0.6], [-0.21, -0.61], [-0.77, -0.63], [-0.67, -0.45],
       [1.15, -0.8], [0.89, 0.42], [0.14, -0.83], [-0.46, 1.97], [0.1, 0.54], [0.66, 1.06],
       [-0.24, -0.61], [-0.06, -0.26], [0.79, 0.19], [0.24, 0.15], [1.23, -0.54], [-0.48, 0.89],
       [-0.11, 0.36], [-0.73, 0.02], [0.43, -1.33], [-0.69, 0.42], [2.25, 0.46], [-0.06, -0.85],
       [0.39, -2.5], [-0.05, -0.33], [-0.52, 2.32], [-2.47, -0.02], [0.07, 0.47], [-1.6, -0.47],
       [-1.5, -0.13], [0.2, 0.16], [-0.2, 0.19], [0.18, 0.41], [0.03, -1.78], [-0.81, 0.35],
       [-0.91, -0.8], [0.11, -0.05], [0.89, 0.51], [-0.44, 0.11], [-2.86, -0.8]],
 'y': [0, 1, 1, 1, 1, 1, 1, 0, 0, 1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 1,
       1, 0, 0, 1, 0, 0, 1, 0, 0, 0],
 'coef': [-0.20510110708497475, 0.24804241215270967, -0.397304730447409],
 'se': [0.3288661011527309, 0.3515433498247984, 0.3922550408952182],
 'p': [0.5328499499735955, 0.48044855964218214, 0.3111205945589889],
 'll': -26.736138121843723}

OLS25 = {'x': [[-1.94, 0.65, -0.17], [-1.74, -2.28, -1.06], [0.38, -0.76, 0.6], [-0.28, 0.18, 0.7],
       [0.58, -1.05, 1.93], [-1.98, -0.19, -1.02], [1.19, -1.31, -1.03], [-1.14, -1.38, -0.57],
       [0.18, -0.97, -1.69], [-0.28, -0.05, 0.7], [-0.82, -0.2, 0.89], [-1.01, -0.11, -0.37],
       [-1.46, -0.13, 1.11], [2.23, -1.46, 0.92], [1.1, 1.21, -0.45], [0.31, -0.62, 0.55],
       [1.19, -0.26, 0.21], [0.85, 0.71, -0.67], [1.36, 0.48, 0.15], [0.03, 0.69, 1.02],
       [-1.27, -0.87, -1.73], [0.44, 0.38, -0.35], [-1.1, 1.31, 1.6], [1.58, 0.05, 0.14],
       [0.14, -0.14, -1.23]],
 'y': [-1.26, 3.01, 2.07, 0.34, 2.47, 1.75, 4.19, 2.8, 1.9, -0.16, 1.16, 0.21, 1.24, 4.78,
       -0.43, 3.2, 1.95, 0.67, 0.67, 0.34, 0.98, 0.57, -0.86, 1.37, 3.0],
 'coef': [1.1153177944883772, 0.47319587335991187, -1.4327932434660868, -0.004297428424455997],
 'se': [0.15265781739710127, 0.12746236461766036, 0.17611610678501596, 0.15665843114184516],
 'p': [3.417453416151144e-07, 0.001289441371638012, 6.284599875024752e-08, 0.978374325666701]}

GEL30 = {'x': [[-0.21, 2.51, -0.96, -3.76], [3.12, 1.0, -1.28, 8.95], [1.48, -0.14, -1.42, 2.34],
       [0.35, 1.33, -0.61, 4.66], [-0.51, 1.24, -1.29, 6.98], [0.42, 2.11, -0.77, 3.74],
       [-1.72, 3.53, -0.46, 2.77], [0.9, 1.31, -1.04, 4.98], [-0.83, 0.74, -0.97, 5.61],
       [-0.63, 1.77, -1.29, 3.49], [0.08, 0.07, -1.52, 3.41], [-0.7, 1.25, -0.66, 6.74],
       [-0.68, 0.27, -0.87, 0.12], [0.85, 3.43, -0.66, -1.57], [0.26, -2.73, -0.54, -1.56],
       [-1.43, 1.69, -1.72, -3.32], [-1.1, 1.85, -1.6, 1.65], [0.16, 0.96, -0.39, 7.52],
       [-0.36, -0.46, -0.47, 2.9], [-1.12, 1.9, -1.31, 0.28], [0.6, 2.78, -1.61, 3.85],
       [-0.49, 0.65, -1.23, 0.43], [0.02, 0.31, -0.94, 6.97], [0.81, 1.84, -2.32, 1.87],
       [0.08, 2.64, -1.52, 2.63], [1.73, -4.13, -1.17, 2.95], [-0.42, 0.26, -0.68, 7.86],
       [3.09, 4.6, -1.03, 5.77], [1.06, 6.38, -1.09, 6.24], [-0.17, 3.41, -1.68, 5.47]],
 'y': [1.26, 10.65, 7.84, 4.58, 5.94, 6.24, 1.94, 7.05, 4.56, 4.07, 5.74, 6.76, 2.83, 3.77,
       4.09, 3.41, 5.15, 7.52, 4.4, 2.8, 7.68, 3.52, 5.66, 9.11, 6.0, 6.68, 4.75, 9.04, 6.86,
       7.82],
 'fits': {'1.0_0.1': [2.577652150521722, 0.9956744535748379, -0.0, -1.6257863022734338,
                      0.3196656938532603],
          '0.5_0.3': [3.1250408709254125, 0.8765397272066288, -0.0, -1.2951707964077428,
                      0.27039588053318575],
          '1.0_0.5': [4.0782280559210315, 0.7842068851809075, 0.0, -0.6552983922617188,
                      0.20050076614251017]}}

COXEL40 = {'x': [[0.43, -1.71, 1.33], [-1.61, 1.99, -0.07], [-0.35, 3.2, -0.91], [-0.98, -0.34, 0.87],
       [0.09, 2.69, -0.93], [-1.24, 2.91, -0.31], [-0.06, 2.19, -1.1], [-1.2, -0.28, -0.77],
       [-0.71, -0.13, -0.33], [-0.27, 0.12, 0.67], [1.58, -1.18, -0.41], [0.89, 1.53, 0.12],
       [-0.91, 1.93, 0.44], [-1.78, 3.05, -0.04], [-0.74, -4.73, -0.17], [-0.06, -1.12, -0.6],
       [-1.2, 2.12, 0.02], [0.28, 1.89, 0.36], [1.74, -0.21, -0.13], [-0.96, 0.75, 0.13],
       [-0.76, -0.1, -0.01], [3.66, -1.53, 0.62], [0.41, -0.28, 0.2], [0.36, -0.1, -0.12],
       [-0.37, -1.16, 0.14], [-0.12, 2.89, 0.69], [-0.06, -0.9, 0.66], [-0.07, 0.63, -0.19],
       [0.13, 3.88, 0.45], [-1.09, -2.55, -0.2], [-0.3, 2.1, -1.06], [1.29, -3.45, 0.52],
       [-1.26, -0.62, 0.43], [0.04, 3.51, 1.26], [-0.52, -2.92, -0.58], [-1.5, -0.82, -0.8],
       [-2.65, -1.95, 0.8], [0.26, -3.88, -0.44], [0.8, 0.61, -0.21], [1.12, 0.88, -0.2]],
 'time': [0.255, 0.22, 7.783, 6.719, 1.436, 14.572, 1.053, 11.754999999999999, 0.123, 0.48,
          0.493, 0.021, 7.417000000000001, 2.661, 0.567, 1.166, 1.303, 3.242, 0.002, 0.175,
          1.063, 0.112, 0.758, 0.368, 0.035, 6.163, 0.325, 1.1709999999999998, 5.006, 3.881,
          0.376, 0.244, 4.744000000000001, 4.121, 0.334, 7.6610000000000005, 6.977, 0.409,
          2.762, 0.717],
 'status': [1, 1, 1, 1, 0, 1, 0, 0, 1, 1, 1, 1, 1, 0, 0, 0, 1, 0, 1, 0, 1, 1, 1, 1, 0, 0, 1, 1,
            1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 0, 1],
 'fits': {'1.0_0.05': [0.7234587702074139, -0.26752139650693574, 0.6095081196654869],
          '0.5_0.1': [0.6454692025312061, -0.23714190877657096, 0.5474373872362261],
          '1.0_0.0': [0.8488093987519019, -0.33186171934636666, 0.7961335294369141]}}

WILSON = {'95_100': [0.8882495307680808, 0.9784563208456319],
 '0_10': [0.0, 0.27753279986288926],
 '10_10': [0.7224672001371106, 1.0],
 '37_250': [0.10931982398325643, 0.19733401886153654]}
