def rain():
    total = 0
    count = 0
    while True:
        line = input("Rainfall amount (-999 stops): ")
        if line == "-999":
            break
        try:
            value = float(line)
        except ValueError:
            continue
        if value >= 0:
            total += value
            count += 1
    if count > 0:
        return total / count
    return 0

if __name__ == "__main__":
    print(rain())
