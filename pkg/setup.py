from setuptools import setup, find_packages


VERSION = '0.1.0'
setup(
    name='rpwmetric',
    version=VERSION,
    packages=find_packages(exclude=['tests', 'tests.*']),
    package_data={'rpwmetric': ['data/test/*.csv', 'data/test/corpus/*']},
    include_package_data=True,
    license='Apache License 2.0',
    description='Robust partial Wasserstein distances between discrete distributions',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: MacOS',
        'Operating System :: Unix',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Intended Audience :: Science/Research'
    ],
    install_requires=[
        'pandas',
        'numpy',
        'scipy',
        'statsmodels',
        'pot',
        'networkx',
        'pillow',
        'matplotlib'
    ],
    python_requires='>=3.6',
    entry_points={
        'console_scripts': ['rpwmetric=rpwmetric.cli:cli'],
    }
)
